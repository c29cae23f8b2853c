fn main() {
    std::process::exit(splitcc::cli::main());
}

//! Exact diagonalization (FCI) on the square H4 fixture and extraction of
//! excitation-labeled overlaps — the "quantum input" object that the
//! split-amplitude methods consume.

use splitcc::ci::{enumerate_determinants, extract_overlaps, solve_ci};
use splitcc::integrals::{read_fcidump, to_spin_orbitals, Ordering};

fn main() -> splitcc::Result<()> {
    let mi = read_fcidump(std::path::Path::new("fixtures/h4_sto3g.fcidump"))?;
    let basis = to_spin_orbitals(&mi, Ordering::Blocked)?;
    let ns = basis.n / 2;

    let dets = enumerate_determinants(ns, 2, 2, None, None)?;
    println!("determinants : {}", dets.len());

    let (energies, states) = solve_ci(&basis, &dets, 3)?;
    for (k, e) in energies.iter().enumerate() {
        println!("root {k}      : {e:.10}");
    }

    let ov = extract_overlaps(&states[0], 4, None)?;
    println!("c0           : {:.10}", ov.c0);
    println!("overlaps     : {}", ov.entries.len());
    let mut by_rank = [0usize; 5];
    for label in ov.entries.keys() {
        by_rank[label.rank()] += 1;
    }
    for (rank, count) in by_rank.iter().enumerate().skip(1) {
        println!("  rank {rank}     : {count}");
    }
    Ok(())
}

//! File exchange with an external overlap source: serialize determinant
//! overlaps measured for the active space (here produced by an exact CASCI
//! solve standing in for a quantum device), read them back, and drive a
//! tailored CCSD run from the file contents. The same format is accepted by
//! the command-line tool via --overlaps.

use splitcc::cc::{solve_tccsd, SolverConfig};
use splitcc::ci::{enumerate_determinants, extract_overlaps, solve_ci};
use splitcc::cluster::{ci_to_cc, embed_active};
use splitcc::integrals::{
    build_active_hamiltonian, read_fcidump, to_spin_orbitals, ActiveSpaceSpec, Ordering,
};
use splitcc::io::{read_overlaps_file, write_overlaps_file};

fn main() -> splitcc::Result<()> {
    let mi = read_fcidump(std::path::Path::new("fixtures/h4_sto3g.fcidump"))?;
    let basis = to_spin_orbitals(&mi, Ordering::Blocked)?;

    let spec = ActiveSpaceSpec {
        active_spatial_orbitals: vec![0, 1, 2, 3],
        n_active_alpha: 2,
        n_active_beta: 2,
    };
    let (act_basis, _) = build_active_hamiltonian(&basis, &spec)?;
    let dets = enumerate_determinants(4, 2, 2, None, None)?;
    let (_, states) = solve_ci(&act_basis, &dets, 1)?;
    let overlaps = extract_overlaps(&states[0], 2, None)?;

    let path = std::env::temp_dir().join("h4_active_overlaps.jsonl");
    write_overlaps_file(&path, &overlaps)?;
    println!(
        "wrote {} overlaps to {}",
        overlaps.entries.len(),
        path.display()
    );

    let loaded = read_overlaps_file(&path)?;
    let max_dev = overlaps
        .entries
        .iter()
        .map(|(label, entry)| (loaded.entries[label].value - entry.value).abs())
        .fold(0.0f64, f64::max);
    println!("round-trip max deviation = {max_dev:.3e}");

    let amps = ci_to_cc(&loaded, 2)?;
    let frozen = embed_active(&amps, &spec, &basis, true)?;
    let tcc = solve_tccsd(&basis, &SolverConfig::default(), &frozen)?;
    println!("tccsd from file: e_total = {:.10}", tcc.base.e_total);
    println!("  e_as  = {:+.10}", tcc.e_as);
    println!("  e_ext = {:+.10}", tcc.e_ext);
    Ok(())
}

//! Read an FCIDUMP, build the spin-orbital basis and Fock matrix, and print
//! the mean-field summary (what `splitcc scf-info` emits).

use splitcc::integrals::{build_fock, read_fcidump, to_spin_orbitals, Ordering};

fn main() -> splitcc::Result<()> {
    let mi = read_fcidump(std::path::Path::new("fixtures/h4_sto3g.fcidump"))?;
    let basis = to_spin_orbitals(&mi, Ordering::Blocked)?;
    let (fock, e_hf) = build_fock(&basis);

    println!("spin orbitals : {}", basis.n);
    println!("electrons     : {}", basis.reference_occupation.len());
    println!("e_core        : {:.10}", basis.e_core);
    println!("e_hf          : {:.10}", e_hf);
    println!("fock diagonal :");
    for p in 0..basis.n / 2 {
        println!("  orbital {p:2}  eps = {:+.6}", fock[(p, p)]);
    }

    // Brillouin condition: the occupied-virtual Fock block vanishes for
    // canonical Hartree-Fock orbitals.
    let occ: std::collections::HashSet<_> = basis.reference_occupation.iter().copied().collect();
    let max_ov = basis
        .reference_occupation
        .iter()
        .flat_map(|&i| {
            (0..basis.n)
                .filter(|p| !occ.contains(p))
                .map(move |a| (i, a))
        })
        .map(|(i, a)| fock[(i, a)].abs())
        .fold(0.0f64, f64::max);
    println!("max |f_ov|    : {max_ov:.3e}");
    Ok(())
}

//! Measurement budgeting: count the determinant overlaps a split-amplitude
//! method consumes, map a CCSD T1 diagnostic to a power-law prefactor, and
//! estimate the shots needed for a target energy error at half filling.

use splitcc::estimator::{
    count_overlaps, predict_error, prefactor_from_t1diag, shot_budget, OverlapMethod,
    PowerLawModel, ShotBudgetQuery,
};

fn main() -> splitcc::Result<()> {
    println!("overlap counts per active space (n_spatial, n_alpha = n_beta):");
    for (nsp, z) in [(4, 2), (6, 3), (8, 4), (10, 5)] {
        let d_tcc = count_overlaps(nsp, z, z, OverlapMethod::Tccsd)?;
        let d_ec = count_overlaps(nsp, z, z, OverlapMethod::Eccc)?;
        println!("  ({nsp:2}, {z})   tccsd {d_tcc:>6}   eccc {d_ec:>8}");
    }

    let model = PowerLawModel::default();
    println!(
        "\npower-law model: beta = {:.3}, gamma = {:.3}",
        model.beta, model.gamma
    );

    // weakly correlated regime (small T1) vs strongly correlated (large T1)
    for t1 in [0.004, 0.02, 0.046] {
        let a = prefactor_from_t1diag(t1);
        let query = ShotBudgetQuery {
            t1_diag: t1,
            target_error: 1e-3,
            d: count_overlaps(6, 3, 3, OverlapMethod::Tccsd)?,
            n_total_spin_orbitals: 56,
            n_qubits: 12,
            assume_half_filling: true,
        };
        let (s, s_low, s_high) = shot_budget(&query, &model)?;
        println!("t1 = {t1:.3}  a = {a:.3}  shots = {s:>9}  (range {s_low} ..= {s_high})");
    }

    // the inverse direction: predicted error at a fixed noise level
    let err = predict_error(prefactor_from_t1diag(0.01), 118, 56, 1e-3, &model);
    println!("\npredicted |dE| at sigma = 1e-3, d = 118, N = 56: {err:.3e} Eh");
    Ok(())
}

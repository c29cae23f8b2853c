//! End-to-end acceptance suite. Each test covers one numbered criterion and
//! prints a single `criterion N (...): PASS` line with the measured values;
//! a failed assertion carries the same diagnostics.
//!
//! Criteria 7 (dataset refit) and 8 (dissociation sweep) depend on data that
//! is generated outside this repository; their tests state exactly what is
//! missing when the environment does not provide it.

use std::path::{Path, PathBuf};

use splitcc::cc::{solve_ccsd, solve_eccc, solve_tccsd, SolverConfig};
use splitcc::ci::{enumerate_determinants, extract_overlaps, solve_ci, Determinant, OverlapSet};
use splitcc::cluster::{ci_to_cc, drop_disconnected, embed_active, AmplitudeSet, SpaceMap};
use splitcc::estimator::{
    count_overlaps, fit_power_law, shot_budget, FitRecord, OverlapMethod, PowerLawModel,
    ShotBudgetQuery,
};
use splitcc::integrals::{
    build_active_hamiltonian, read_fcidump, to_spin_orbitals, ActiveSpaceSpec, Ordering,
    SpinOrbitalBasis,
};
use splitcc::noise::{run_noise_study, Workflow};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn load(name: &str) -> SpinOrbitalBasis {
    let mi = read_fcidump(&fixture(name)).unwrap();
    to_spin_orbitals(&mi, Ordering::Blocked).unwrap()
}

/// Ground-state FCI energy plus overlaps through rank 4.
fn fci(basis: &SpinOrbitalBasis) -> (f64, OverlapSet) {
    let ns = basis.n / 2;
    let na = basis
        .reference_occupation
        .iter()
        .filter(|&&p| p < ns)
        .count();
    let nb = basis.reference_occupation.len() - na;
    let dets = enumerate_determinants(ns, na, nb, None, None).unwrap();
    let (energies, states) = solve_ci(basis, &dets, 1).unwrap();
    let ov = extract_overlaps(&states[0], 4, None).unwrap();
    (energies[0], ov)
}

#[test]
fn criterion_1_external_correction_is_exact() {
    let basis = load("h4_sto3g.fcidump");
    let (e_fci, ov) = fci(&basis);
    let amps = ci_to_cc(&ov, 4).unwrap();
    let ec = solve_eccc(&basis, &amps, &SolverConfig::default()).unwrap();
    let err = (ec.e_total - e_fci).abs();
    assert!(
        err < 1e-8,
        "ec-CC with exact T3/T4 deviates from FCI by {err:.2e} Eh"
    );
    println!(
        "criterion 1 (ec-CC exactness): PASS — |E_ecCC - E_FCI| = {err:.2e} Eh (tolerance 1e-8)"
    );
}

#[test]
fn criterion_2_ccsd_error_anchor() {
    let basis = load("h4_sto3g.fcidump");
    let (e_fci, _) = fci(&basis);
    let ccsd = solve_ccsd(&basis, &SolverConfig::default(), None).unwrap();
    let diff_meh = (ccsd.e_total - e_fci).abs() * 1e3;
    assert!(
        (diff_meh - 7.05).abs() < 0.1,
        "|E_CCSD - E_FCI| = {diff_meh:.4} mEh, expected 7.05 ± 0.1"
    );
    println!(
        "criterion 2 (CCSD error anchor): PASS — |E_CCSD - E_FCI| = {diff_meh:.4} mEh (expected 7.05 ± 0.1)"
    );
}

#[test]
fn criterion_3_cisd_seeded_limits() {
    let basis = load("h4_sto3g.fcidump");
    let ns = basis.n / 2;
    let config = SolverConfig::default();
    let reference = Determinant::from_occupied(&basis.reference_occupation, ns);
    let dets = enumerate_determinants(ns, 2, 2, Some(2), Some(reference)).unwrap();
    let (energies, states) = solve_ci(&basis, &dets, 1).unwrap();
    let e_cisd = energies[0];
    let ov = extract_overlaps(&states[0], 4, None).unwrap();
    let amps = ci_to_cc(&ov, 4).unwrap();

    // as-is input: the CISD energy comes back
    let type1 = solve_eccc(&basis, &amps, &config).unwrap();
    let d1 = (type1.e_total - e_cisd).abs();
    assert!(d1 < 1e-8, "type-I deviates from CISD by {d1:.2e} Eh");

    // purely disconnected T3/T4 removed: plain CCSD comes back
    let (amps2, _) = drop_disconnected(&amps, &ov, 1e-12, 0.0);
    let type2 = solve_eccc(&basis, &amps2, &config).unwrap();
    let ccsd = solve_ccsd(&basis, &config, None).unwrap();
    let d2 = (type2.e_total - ccsd.e_total).abs();
    assert!(d2 < 1e-8, "type-II deviates from CCSD by {d2:.2e} Eh");

    println!(
        "criterion 3 (CISD-seeded limits): PASS — type-I vs CISD {d1:.2e} Eh, type-II vs CCSD {d2:.2e} Eh (tolerance 1e-8)"
    );
}

#[test]
fn criterion_4_tccsd_limits() {
    let config = SolverConfig::default();
    let mut split_max = 0.0f64;
    for name in ["h2_sto3g.fcidump", "h4_sto3g.fcidump"] {
        let basis = load(name);
        let ns = basis.n / 2;
        let na = basis
            .reference_occupation
            .iter()
            .filter(|&&p| p < ns)
            .count();
        let nb = basis.reference_occupation.len() - na;

        // full active space: the tailored energy is the CASCI energy
        let spec = ActiveSpaceSpec {
            active_spatial_orbitals: (0..ns).collect(),
            n_active_alpha: na,
            n_active_beta: nb,
        };
        let (act_basis, _) = build_active_hamiltonian(&basis, &spec).unwrap();
        let dets = enumerate_determinants(ns, na, nb, None, None).unwrap();
        let (energies, states) = solve_ci(&act_basis, &dets, 1).unwrap();
        let ov = extract_overlaps(&states[0], 2, None).unwrap();
        let amps = ci_to_cc(&ov, 2).unwrap();
        let frozen = embed_active(&amps, &spec, &basis, true).unwrap();
        let tcc = solve_tccsd(&basis, &config, &frozen).unwrap();
        let dev = (tcc.base.e_total - energies[0]).abs();
        assert!(dev < 1e-8, "{name}: full-AS TCCSD vs CASCI {dev:.2e} Eh");
        split_max = split_max.max((tcc.e_as + tcc.e_ext - tcc.base.e_correlation).abs());

        // empty active space: nothing frozen, plain CCSD
        let space = SpaceMap::from_reference(&basis.reference_occupation, ns);
        let tcc0 = solve_tccsd(&basis, &config, &AmplitudeSet::zero(space)).unwrap();
        let ccsd = solve_ccsd(&basis, &config, None).unwrap();
        let dev0 = (tcc0.base.e_total - ccsd.e_total).abs();
        assert!(dev0 < 1e-10, "{name}: empty-AS TCCSD vs CCSD {dev0:.2e} Eh");
        split_max = split_max.max((tcc0.e_as + tcc0.e_ext - tcc0.base.e_correlation).abs());
    }
    assert!(
        split_max < 1e-10,
        "energy split violated by {split_max:.2e} Eh"
    );
    println!(
        "criterion 4 (TCCSD limits): PASS — full AS = CASCI (1e-8), empty AS = CCSD (1e-10), max |e_as + e_ext - e_corr| = {split_max:.2e}"
    );
}

#[test]
fn criterion_5_overlap_counts() {
    // (n_spatial_active, n_alpha = n_beta, d_tccsd, d_eccc); 0 marks entries
    // published for one method only
    let table: &[(usize, usize, u64, u64)] = &[
        (2, 1, 4, 4),
        (4, 2, 27, 36),
        (6, 2, 93, 225),
        (6, 3, 118, 381),
        (8, 2, 199, 784),
        (8, 3, 316, 2436),
        (8, 4, 361, 3355),
        (10, 5, 876, 21126),
        (10, 6, 805, 17255),
        (12, 6, 1819, 98694),
        (14, 5, 2836, 243376),
        (16, 3, 2068, 97956),
        (16, 4, 3193, 285255),
        (16, 5, 4236, 555336),
        (16, 6, 5071, 840796),
        (16, 8, 5793, 0),
    ];
    let mut n_checked = 0;
    for &(nsp, z, dt, de) in table {
        if dt > 0 {
            assert_eq!(
                count_overlaps(nsp, z, z, OverlapMethod::Tccsd).unwrap(),
                dt,
                "tccsd count for ({nsp}, {z})"
            );
            n_checked += 1;
        }
        if de > 0 {
            assert_eq!(
                count_overlaps(nsp, z, z, OverlapMethod::Eccc).unwrap(),
                de,
                "eccc count for ({nsp}, {z})"
            );
            n_checked += 1;
        }
    }
    println!(
        "criterion 5 (overlap counts): PASS — {n_checked} published values reproduced exactly"
    );
}

#[test]
fn criterion_6_shot_budget_table() {
    let model = PowerLawModel::default();
    let text = std::fs::read_to_string(fixture("n2_shot_budget_reference.csv")).unwrap();
    let mut total = 0u64;
    let mut max_rel = 0.0f64;
    let mut anchors: Vec<(f64, u64)> = Vec::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let r: f64 = f[0].parse().unwrap();
        let t1: f64 = f[1].parse().unwrap();
        let s_ref: f64 = f[2].parse().unwrap();
        let (s, _, _) = shot_budget(
            &ShotBudgetQuery {
                t1_diag: t1,
                target_error: 1e-3,
                d: 118,
                n_total_spin_orbitals: 56,
                n_qubits: 12,
                assume_half_filling: true,
            },
            &model,
        )
        .unwrap();
        let rel = (s as f64 - s_ref).abs() / s_ref;
        assert!(
            rel < 0.05,
            "row R = {r} Å: {s} vs reference {s_ref} ({:.1}% off)",
            rel * 100.0
        );
        max_rel = max_rel.max(rel);
        total += s;
        if r == 0.8 || r == 2.8 {
            anchors.push((r, s));
        }
    }
    // spot anchors at the curve ends
    for &(r, s) in &anchors {
        let expect = if r == 0.8 { 5231.0 } else { 3.3089e6 };
        let rel = (s as f64 - expect).abs() / expect;
        assert!(rel < 0.05, "anchor R = {r}: {s} vs {expect}");
    }
    let total_rel = (total as f64 - 2.9e7).abs() / 2.9e7;
    assert!(
        total_rel < 0.05,
        "total {total} vs 2.9e7 ({:.1}% off)",
        total_rel * 100.0
    );
    println!(
        "criterion 6 (shot budgets): PASS — 21 rows within {:.2}% of reference, total {total} ({:+.2}% vs 2.9e7)",
        max_rel * 100.0,
        total_rel * 100.0
    );
}

#[test]
fn criterion_7a_noise_linearity() {
    let basis = load("h4_sto3g.fcidump");
    let spec = ActiveSpaceSpec {
        active_spatial_orbitals: vec![0, 1, 2, 3],
        n_active_alpha: 2,
        n_active_beta: 2,
    };
    let (act_basis, _) = build_active_hamiltonian(&basis, &spec).unwrap();
    let dets = enumerate_determinants(4, 2, 2, None, None).unwrap();
    let (_, states) = solve_ci(&act_basis, &dets, 1).unwrap();
    let ov = extract_overlaps(&states[0], 2, None).unwrap();

    let res = run_noise_study(
        &Workflow::Tccsd { active_space: spec },
        &basis,
        &ov,
        &[1e-4, 1e-3, 1e-2],
        30,
        42,
        200,
        &SolverConfig::default(),
    )
    .unwrap();
    let bad: usize = res.points.iter().map(|p| p.n_nonconverged).sum();
    assert_eq!(bad, 0, "{bad} non-converged noisy samples at sigma <= 1e-2");
    assert!(
        res.beta_sigma > 0.9 && res.beta_sigma < 1.1,
        "fitted sigma exponent {:.4} outside [0.9, 1.1]",
        res.beta_sigma
    );
    println!(
        "criterion 7a (noise linearity): PASS — beta_sigma = {:.4} ± {:.4}, 0 non-converged of {} samples",
        res.beta_sigma,
        res.beta_sigma_error,
        res.points.iter().map(|p| p.n_samples).sum::<usize>()
    );
}

/// Refits the published noise-study dataset (per-system mean |ΔE| vs σ, d, N)
/// and checks the recovered power-law exponents. The dataset is distributed
/// separately; point `SPLITCC_NOISE_DATASET` at the CSV or place it at
/// `fixtures/zenodo_noise_dataset.csv`. Expected columns:
/// `label,d,n_spin_orbitals,sigma,mean_abs_error` (one row per system/σ).
#[test]
fn criterion_7b_published_dataset_refit() {
    let path = std::env::var_os("SPLITCC_NOISE_DATASET")
        .map(PathBuf::from)
        .unwrap_or_else(|| fixture("zenodo_noise_dataset.csv"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| {
        panic!(
            "criterion 7b (dataset refit): FAIL — cannot read {} ({e}). \
             This check refits the externally published noise dataset; it needs \
             network-fetched data that is not bundled. Download the noise-study \
             CSV, convert it to columns label,d,n_spin_orbitals,sigma,mean_abs_error, \
             and set SPLITCC_NOISE_DATASET or save it as fixtures/zenodo_noise_dataset.csv.",
            path.display()
        )
    });
    let mut records = Vec::new();
    for (ln, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        assert!(
            f.len() >= 5,
            "line {}: expected 5 columns, got {}",
            ln + 1,
            f.len()
        );
        records.push(FitRecord {
            label: f[0].to_string(),
            d: f[1].trim().parse().unwrap(),
            n_total_spin_orbitals: f[2].trim().parse().unwrap(),
            sigma: f[3].trim().parse().unwrap(),
            mean_abs_error: f[4].trim().parse().unwrap(),
        });
    }
    let fit = fit_power_law(&records, 200, 7).unwrap();
    assert!(
        (fit.beta - 0.277).abs() < 0.06,
        "refit beta = {:.4}, expected 0.277 ± 0.06",
        fit.beta
    );
    assert!(
        (fit.gamma + 1.074).abs() < 0.13,
        "refit gamma = {:.4}, expected -1.074 ± 0.13",
        fit.gamma
    );
    println!(
        "criterion 7b (dataset refit): PASS — beta = {:.4} ± {:.4}, gamma = {:.4} ± {:.4}",
        fit.beta, fit.beta_err, fit.gamma, fit.gamma_err
    );
}

/// Nitrogen dissociation with a (6e,6o) window: the tailored curve raises the
/// barrier relative to CASCI by ~45 mEh and stays free of artificial local
/// maxima, while plain CCSD develops a spurious hump near 2.1 Å. ~8 min.
#[test]
fn criterion_8_n2_barrier_shift() {
    let config = SolverConfig::default();
    let radii: Vec<f64> = (8..=28).map(|i| i as f64 / 10.0).collect();
    let mut e_casci = Vec::new();
    let mut e_tccsd = Vec::new();

    for &r in &radii {
        let name = format!("n2_ccpvdz_r{:02}.fcidump.gz", (r * 10.0).round() as u32);
        let basis = load(&name);
        let spec = ActiveSpaceSpec {
            active_spatial_orbitals: (4..10).collect(),
            n_active_alpha: 3,
            n_active_beta: 3,
        };
        let (act_basis, _) = build_active_hamiltonian(&basis, &spec).unwrap();
        let dets = enumerate_determinants(6, 3, 3, None, None).unwrap();
        let (energies, states) = solve_ci(&act_basis, &dets, 1).unwrap();
        e_casci.push(energies[0]);

        let ov = extract_overlaps(&states[0], 2, None).unwrap();
        let amps = ci_to_cc(&ov, 2).unwrap();
        let frozen = embed_active(&amps, &spec, &basis, true).unwrap();
        let tcc = solve_tccsd(&basis, &config, &frozen).unwrap();
        e_tccsd.push(tcc.base.e_total);
    }

    let barrier = |curve: &[f64]| -> f64 {
        let i_min = (0..curve.len())
            .min_by(|&a, &b| curve[a].total_cmp(&curve[b]))
            .unwrap();
        let max_beyond = curve[i_min..].iter().cloned().fold(f64::MIN, f64::max);
        (max_beyond - curve[i_min]) * 1e3
    };
    let b_casci = barrier(&e_casci);
    let b_tccsd = barrier(&e_tccsd);
    let shift = b_tccsd - b_casci;
    assert!(
        (shift - 45.4).abs() < 2.0,
        "barrier shift {shift:.2} mEh (TCCSD {b_tccsd:.2} - CASCI {b_casci:.2}), expected 45.4 ± 2"
    );

    // tailored curve: no interior local maximum beyond 1.7 Å
    for i in 1..radii.len() - 1 {
        if radii[i] <= 1.7 {
            continue;
        }
        assert!(
            !(e_tccsd[i] > e_tccsd[i - 1] && e_tccsd[i] > e_tccsd[i + 1]),
            "tailored curve has a local maximum at {} Å",
            radii[i]
        );
    }

    // plain CCSD develops one near 2.1 Å (solved only on the converged window;
    // the solver stops converging past ~2.4 Å, which is the known breakdown)
    let mut e_ccsd = Vec::new();
    for r in [1.9f64, 2.0, 2.1, 2.2, 2.3] {
        let name = format!("n2_ccpvdz_r{:02}.fcidump.gz", (r * 10.0).round() as u32);
        let basis = load(&name);
        e_ccsd.push(solve_ccsd(&basis, &config, None).unwrap().e_total);
    }
    let hump =
        (1..e_ccsd.len() - 1).any(|i| e_ccsd[i] > e_ccsd[i - 1] && e_ccsd[i] > e_ccsd[i + 1]);
    assert!(
        hump,
        "expected a CCSD local maximum in 1.9–2.3 Å, energies {e_ccsd:?}"
    );

    println!(
        "criterion 8 (dissociation barrier shift): PASS — CASCI barrier {b_casci:.2} mEh, tailored {b_tccsd:.2} mEh, shift {shift:.2} mEh (expected 45.4 ± 2); CCSD hump near 2.1 Å confirmed, tailored curve clean"
    );
}

// --- criterion 9: randomized property suites ---

use proptest::prelude::*;
use proptest::test_runner::{Config as PtConfig, TestError, TestRunner};
use splitcc::ci::{enumerate_labels, CIVector, OverlapEntry};
use splitcc::cluster::{cc_to_ci, filter_variance, phase_align};
use splitcc::noise::{perturb_overlaps, NoiseSource, NoiseSpec};

const PT_CASES: u32 = 128;

/// Four spatial orbitals, two electrons of each spin: every excitation rank
/// through 4 is representable.
fn test_reference() -> (Determinant, usize) {
    (Determinant::from_occupied(&[0, 1, 4, 5], 4), 4)
}

fn arb_overlaps() -> impl Strategy<Value = OverlapSet> {
    let (reference, ns) = test_reference();
    let labels = enumerate_labels(&reference, ns, 4);
    let n = labels.len();
    (
        prop::collection::vec(-0.15f64..0.15, n),
        prop_oneof![0.3f64..1.5, -1.5f64..-0.3],
    )
        .prop_map(move |(values, c0)| {
            let entries = labels
                .iter()
                .cloned()
                .zip(values.iter().map(|&v| OverlapEntry {
                    value: v,
                    variance: None,
                }))
                .collect();
            OverlapSet {
                reference,
                n_spatial: ns,
                c0,
                c0_variance: None,
                entries,
            }
        })
}

fn run_suite<S: Strategy>(
    name: &str,
    strategy: S,
    check: impl Fn(S::Value) -> std::result::Result<(), TestCaseError>,
) -> String {
    let mut runner = TestRunner::new(PtConfig {
        cases: PT_CASES,
        failure_persistence: None,
        ..PtConfig::default()
    });
    match runner.run(&strategy, check) {
        Ok(()) => format!("{name} ({PT_CASES} cases)"),
        Err(TestError::Fail(reason, value)) => {
            panic!("criterion 9 suite '{name}' failed: {reason}\ninput: {value:?}")
        }
        Err(TestError::Abort(reason)) => {
            panic!("criterion 9 suite '{name}' aborted: {reason}")
        }
    }
}

#[test]
fn criterion_9_property_suites() {
    let mut passed = Vec::new();

    // exact inverse pair: coefficients -> amplitudes -> coefficients
    passed.push(run_suite("round trip", arb_overlaps(), |ov| {
        let amps = ci_to_cc(&ov, 4).unwrap();
        let back = cc_to_ci(&amps, 4).unwrap();
        for (label, entry) in &ov.entries {
            let expect = entry.value / ov.c0;
            let got = back.entries[label].value;
            prop_assert!(
                (got - expect).abs() < 1e-12,
                "label {label:?}: {got} vs {expect}"
            );
        }
        Ok(())
    }));

    // rescaling the whole CI vector changes nothing after normalization
    passed.push(run_suite(
        "scale invariance",
        (arb_overlaps(), prop_oneof![0.05f64..20.0, -20.0f64..-0.05]),
        |(ov, lambda)| {
            let mut scaled = ov.clone();
            scaled.c0 *= lambda;
            for entry in scaled.entries.values_mut() {
                entry.value *= lambda;
            }
            let a = ci_to_cc(&ov, 4).unwrap();
            let b = ci_to_cc(&scaled, 4).unwrap();
            let d1 = (&a.t1 - &b.t1).iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let d2 = (&a.t2 - &b.t2).iter().fold(0.0f64, |m, x| m.max(x.abs()));
            prop_assert!(
                d1 < 1e-12 && d2 < 1e-12,
                "dense deviation {d1:.2e}/{d2:.2e}"
            );
            for (label, va) in a.t3.iter().chain(a.t4.iter()) {
                let vb =
                    b.t3.get(label)
                        .or_else(|| b.t4.get(label))
                        .copied()
                        .unwrap_or(0.0);
                prop_assert!((va - vb).abs() < 1e-12, "{label:?}: {va} vs {vb}");
            }
            Ok(())
        },
    ));

    // the dense doubles block is antisymmetric in both index pairs
    passed.push(run_suite("t2 antisymmetry", arb_overlaps(), |ov| {
        let amps = ci_to_cc(&ov, 4).unwrap();
        let (no, nv) = (amps.space.n_occ(), amps.space.n_virt());
        for i in 0..no {
            for j in 0..no {
                for a in 0..nv {
                    for b in 0..nv {
                        let t = amps.t2[(i, j, a, b)];
                        prop_assert!((t + amps.t2[(j, i, a, b)]).abs() < 1e-14);
                        prop_assert!((t + amps.t2[(i, j, b, a)]).abs() < 1e-14);
                    }
                }
            }
        }
        Ok(())
    }));

    // phase alignment: idempotent and blind to a global phase
    let (reference, ns) = test_reference();
    let dets = enumerate_determinants(ns, 2, 2, None, None).unwrap();
    let n_dets = dets.len();
    passed.push(run_suite(
        "phase alignment",
        (
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n_dets)
                .prop_filter("nonzero vector", |cs| {
                    cs.iter().any(|&(re, im)| re * re + im * im > 1e-4)
                }),
            0.0f64..std::f64::consts::TAU,
        ),
        move |(coeffs, theta)| {
            let state = CIVector {
                basis: dets.clone(),
                coefficients: coeffs.clone(),
                reference,
                n_spatial: ns,
            };
            let aligned = phase_align(&state).unwrap();
            let twice = phase_align(&aligned).unwrap();
            let (ct, st) = (theta.cos(), theta.sin());
            let rotated = CIVector {
                basis: dets.clone(),
                coefficients: coeffs
                    .iter()
                    .map(|&(re, im)| (re * ct - im * st, re * st + im * ct))
                    .collect(),
                reference,
                n_spatial: ns,
            };
            let aligned_rot = phase_align(&rotated).unwrap();
            for k in 0..n_dets {
                prop_assert!((aligned.coefficients[k].0 - twice.coefficients[k].0).abs() < 1e-12);
                prop_assert!(
                    (aligned.coefficients[k].0 - aligned_rot.coefficients[k].0).abs() < 1e-10
                );
                prop_assert!(aligned.coefficients[k].1 == 0.0);
            }
            Ok(())
        },
    ));

    // a stricter significance cut never un-zeroes an entry
    passed.push(run_suite(
        "variance-filter monotonicity",
        (
            arb_overlaps(),
            prop::collection::vec(1e-6f64..0.01, 100),
            0.0f64..4.0,
            0.1f64..4.0,
        ),
        |(mut ov, variances, k1, dk)| {
            for (entry, var) in ov.entries.values_mut().zip(variances) {
                entry.variance = Some(var);
            }
            let k2 = k1 + dk;
            let (f1, r1) = filter_variance(&ov, k1, false).unwrap();
            let (f2, r2) = filter_variance(&ov, k2, false).unwrap();
            prop_assert!(r1.n_zeroed_by_variance <= r2.n_zeroed_by_variance);
            for (label, e1) in &f1.entries {
                if e1.value == 0.0 && ov.entries[label].value != 0.0 {
                    prop_assert!(
                        f2.entries[label].value == 0.0,
                        "entry zeroed at k = {k1} but kept at k = {k2}"
                    );
                }
            }
            Ok(())
        },
    ));

    // same seed, same draw; different seed, different draw
    passed.push(run_suite(
        "seeded-noise determinism",
        (arb_overlaps(), 1e-4f64..1e-1, any::<u64>()),
        |(ov, sigma, seed)| {
            let spec = NoiseSpec {
                source: NoiseSource::Sigma(sigma),
                seed,
            };
            let a = perturb_overlaps(&ov, &spec).unwrap();
            let b = perturb_overlaps(&ov, &spec).unwrap();
            for (label, ea) in &a.entries {
                prop_assert!(ea.value == b.entries[label].value);
            }
            prop_assert!(a.c0 == b.c0);
            let other = NoiseSpec {
                source: NoiseSource::Sigma(sigma),
                seed: seed.wrapping_add(1),
            };
            let c = perturb_overlaps(&ov, &other).unwrap();
            prop_assert!(
                a.c0 != c.c0 || a.entries.iter().any(|(l, e)| e.value != c.entries[l].value),
                "different seeds produced identical noise"
            );
            Ok(())
        },
    ));

    // more overlaps, stronger correlation, or a tighter target never lowers
    // the shot count
    passed.push(run_suite(
        "budget monotonicity",
        (1e-3f64..0.05, 10u64..5000, 1e-4f64..1e-2),
        |(t1, d, target)| {
            let model = PowerLawModel::default();
            let q = |t1, d, target| ShotBudgetQuery {
                t1_diag: t1,
                target_error: target,
                d,
                n_total_spin_orbitals: 56,
                n_qubits: 12,
                assume_half_filling: true,
            };
            let (s0, s_low, s_high) = shot_budget(&q(t1, d, target), &model).unwrap();
            prop_assert!(s_low <= s0 && s0 <= s_high);
            let (s1, _, _) = shot_budget(&q(t1 + 0.01, d, target), &model).unwrap();
            let (s2, _, _) = shot_budget(&q(t1, d + 100, target), &model).unwrap();
            let (s3, _, _) = shot_budget(&q(t1, d, target / 2.0), &model).unwrap();
            prop_assert!(s1 >= s0 && s2 >= s0 && s3 >= s0);
            Ok(())
        },
    ));

    println!(
        "criterion 9 (property suites): PASS — {}",
        passed.join("; ")
    );
}

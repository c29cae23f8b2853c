//! Synthetic Gaussian shot-noise model for externally measured overlaps.
//!
//! The variance of a matchgate-shadow overlap estimate at half filling is
//! modeled as σ² = √(2n)/s for n qubits and s shots. Perturbation draws come
//! from a counter-based seedable generator (ChaCha) with one substream per
//! sample index, so studies are bit-reproducible regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Normal};

use crate::cc::{solve_eccc, solve_tccsd, SolverConfig};
use crate::ci::OverlapSet;
use crate::cluster::{ci_to_cc, drop_disconnected, embed_active, filter_variance};
use crate::error::{Result, SplitccError};
use crate::integrals::{ActiveSpaceSpec, SpinOrbitalBasis};

/// How to obtain the overlap standard deviation.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSource {
    /// Direct standard deviation.
    Sigma(f64),
    /// Derived from the half-filling shot-variance relation.
    Shots { n_qubits: usize, shots: u64 },
}

#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct NoiseSpec {
    pub source: NoiseSource,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn sigma(&self) -> Result<f64> {
        match self.source {
            NoiseSource::Sigma(s) => {
                if s < 0.0 || !s.is_finite() {
                    return Err(SplitccError::InvalidInput(format!(
                        "sigma must be a finite non-negative number, got {s}"
                    )));
                }
                Ok(s)
            }
            NoiseSource::Shots { n_qubits, shots } => {
                Ok(variance_from_shots(n_qubits, shots)?.sqrt())
            }
        }
    }
}

/// Overlap-estimate variance at half filling: σ² = √(2n)/s.
pub fn variance_from_shots(n_qubits: usize, shots: u64) -> Result<f64> {
    if shots == 0 {
        return Err(SplitccError::InvalidInput("shot count must be ≥ 1".into()));
    }
    if n_qubits == 0 {
        return Err(SplitccError::InvalidInput("qubit count must be ≥ 1".into()));
    }
    Ok((2.0 * n_qubits as f64).sqrt() / shots as f64)
}

/// As [`variance_from_shots`] but with an explicit filling, rejecting
/// anything away from half filling (the general prefactor b(n, ζ) has no
/// closed form here; supply σ directly if you have one).
pub fn variance_from_shots_with_filling(
    n_qubits: usize,
    n_particles: usize,
    shots: u64,
) -> Result<f64> {
    if 2 * n_particles != n_qubits {
        return Err(SplitccError::InvalidInput(format!(
            "variance model is fitted at half filling only (n = {n_qubits}, ζ = {n_particles}); \
             away from half filling pass an explicit sigma instead"
        )));
    }
    variance_from_shots(n_qubits, shots)
}

/// Add an independent Normal(0, σ²) draw to every overlap including c0, and
/// record σ² as the per-entry variance. σ = 0 returns the input unchanged.
pub fn perturb_overlaps(overlaps: &OverlapSet, spec: &NoiseSpec) -> Result<OverlapSet> {
    let sigma = spec.sigma()?;
    let mut out = overlaps.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, sigma).unwrap();
    let var = sigma * sigma;
    out.c0 += normal.sample(&mut rng);
    out.c0_variance = Some(var);
    for entry in out.entries.values_mut() {
        entry.value += normal.sample(&mut rng);
        entry.variance = Some(var);
    }
    Ok(out)
}

/// Which energy workflow a noise sample re-runs.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Workflow {
    /// Overlaps (rank ≤ 2, active-space labels) → amplitudes → frozen-core
    /// tailored CCSD.
    Tccsd { active_space: ActiveSpaceSpec },
    /// Overlaps (rank ≤ 4) → variance filter → amplitudes → drop purely
    /// disconnected T3/T4 → ec-CC.
    Eccc {
        active_space: ActiveSpaceSpec,
        /// Zero out entries with |value| < k·σ before cluster analysis
        /// (k = 0 disables the filter).
        variance_filter_k: f64,
        ci_zero_threshold: f64,
    },
}

impl Workflow {
    /// One clean or perturbed pipeline evaluation → total energy.
    pub fn run(
        &self,
        basis: &SpinOrbitalBasis,
        overlaps: &OverlapSet,
        config: &SolverConfig,
    ) -> Result<f64> {
        match self {
            Workflow::Tccsd { active_space } => {
                let amps = ci_to_cc(overlaps, 2)?;
                let frozen = embed_active(&amps, active_space, basis, true)?;
                Ok(solve_tccsd(basis, config, &frozen)?.base.e_total)
            }
            Workflow::Eccc {
                active_space,
                variance_filter_k,
                ci_zero_threshold,
            } => {
                let filtered = if *variance_filter_k > 0.0 {
                    filter_variance(overlaps, *variance_filter_k, false)?.0
                } else {
                    overlaps.clone()
                };
                let amps = ci_to_cc(&filtered, 4)?;
                let (amps, _) =
                    drop_disconnected(&amps, &filtered, *ci_zero_threshold, *variance_filter_k);
                let full = embed_active(&amps, active_space, basis, false)?;
                Ok(solve_eccc(basis, &full, config)?.e_total)
            }
        }
    }
}

/// One σ row of a noise-response study.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct NoisePoint {
    pub sigma: f64,
    pub mean_abs_error: f64,
    pub n_samples: usize,
    pub n_nonconverged: usize,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct NoiseStudyResult {
    pub points: Vec<NoisePoint>,
    pub beta_sigma: f64,
    pub beta_sigma_error: f64,
}

/// Mean |E_noisy − E_clean| over `n_samples` independent perturbations.
///
/// Sample k uses generator stream k over the study seed, so results do not
/// depend on evaluation order. Samples whose solve fails to converge (or
/// loses reference dominance under extreme noise) are counted, not fatal.
pub fn sample_energy_error(
    workflow: &Workflow,
    basis: &SpinOrbitalBasis,
    exact_overlaps: &OverlapSet,
    sigma: f64,
    n_samples: usize,
    seed: u64,
    config: &SolverConfig,
) -> Result<NoisePoint> {
    if n_samples == 0 {
        return Err(SplitccError::InvalidInput(
            "need at least one sample".into(),
        ));
    }
    let e_clean = workflow.run(basis, exact_overlaps, config)?;
    if sigma == 0.0 {
        return Ok(NoisePoint {
            sigma,
            mean_abs_error: 0.0,
            n_samples,
            n_nonconverged: 0,
        });
    }
    let mut total = 0.0;
    let mut n_ok = 0usize;
    let mut n_bad = 0usize;
    for k in 0..n_samples {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        // draw a per-sample sub-seed from the stream; perturb_overlaps then
        // owns its own generator so the entry count cannot shift streams
        let sub_seed: u64 = rand::Rng::gen(&mut rng);
        let spec = NoiseSpec {
            source: NoiseSource::Sigma(sigma),
            seed: sub_seed,
        };
        let noisy = perturb_overlaps(exact_overlaps, &spec)?;
        match workflow.run(basis, &noisy, config) {
            Ok(e) => {
                total += (e - e_clean).abs();
                n_ok += 1;
            }
            Err(SplitccError::NonConvergence(_)) | Err(SplitccError::ReferenceDominance { .. }) => {
                n_bad += 1
            }
            Err(e) => return Err(e),
        }
    }
    Ok(NoisePoint {
        sigma,
        mean_abs_error: if n_ok > 0 {
            total / n_ok as f64
        } else {
            f64::NAN
        },
        n_samples,
        n_nonconverged: n_bad,
    })
}

/// Log–log least-squares slope of |ΔE| vs σ with a bootstrap standard error.
pub fn fit_sigma_exponent(
    points: &[(f64, f64)],
    n_bootstrap: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(SplitccError::InvalidInput(format!(
            "exponent fit needs ≥ 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(SplitccError::InvalidInput(
            "exponent fit requires strictly positive sigma and error values".into(),
        ));
    }
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &(x, _)| {
            (lo.min(x), hi.max(x))
        });
    if hi / lo < 100.0 * (1.0 - 1e-9) {
        return Err(SplitccError::InvalidInput(format!(
            "sigma grid must span at least two decades (got {lo:.3e}..{hi:.3e})"
        )));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let slope = |pts: &[(f64, f64)]| -> f64 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    };
    let beta = slope(&logs);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut boots = Vec::with_capacity(n_bootstrap);
    for _ in 0..n_bootstrap {
        let resample: Vec<(f64, f64)> = (0..logs.len())
            .map(|_| logs[rand::Rng::gen_range(&mut rng, 0..logs.len())])
            .collect();
        let sxx_check: f64 = {
            let n = resample.len() as f64;
            let sx: f64 = resample.iter().map(|p| p.0).sum();
            let sxx: f64 = resample.iter().map(|p| p.0 * p.0).sum();
            n * sxx - sx * sx
        };
        if sxx_check.abs() > 1e-12 {
            boots.push(slope(&resample));
        }
    }
    let err = if boots.len() > 1 {
        let m = boots.iter().sum::<f64>() / boots.len() as f64;
        (boots.iter().map(|b| (b - m) * (b - m)).sum::<f64>() / (boots.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok((beta, err))
}

/// Full σ sweep: per-σ sampling plus the exponent fit over the grid means.
#[allow(clippy::too_many_arguments)]
pub fn run_noise_study(
    workflow: &Workflow,
    basis: &SpinOrbitalBasis,
    exact_overlaps: &OverlapSet,
    sigma_grid: &[f64],
    n_samples: usize,
    seed: u64,
    n_bootstrap: usize,
    config: &SolverConfig,
) -> Result<NoiseStudyResult> {
    let mut points = Vec::with_capacity(sigma_grid.len());
    for (gi, &sigma) in sigma_grid.iter().enumerate() {
        // disjoint stream blocks per grid index
        let grid_seed = seed.wrapping_add((gi as u64) << 32);
        points.push(sample_energy_error(
            workflow,
            basis,
            exact_overlaps,
            sigma,
            n_samples,
            grid_seed,
            config,
        )?);
    }
    let fit_pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.mean_abs_error.is_finite() && p.mean_abs_error > 0.0)
        .map(|p| (p.sigma, p.mean_abs_error))
        .collect();
    let (beta_sigma, beta_sigma_error) = fit_sigma_exponent(&fit_pts, n_bootstrap, seed)?;
    Ok(NoiseStudyResult {
        points,
        beta_sigma,
        beta_sigma_error,
    })
}

impl NoiseStudyResult {
    /// CSV rows: sigma, mean_abs_error_hartree, n_samples, n_nonconverged.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "sigma",
            "mean_abs_error_hartree",
            "n_samples",
            "n_nonconverged",
        ])
        .map_err(|e| SplitccError::InvalidInput(e.to_string()))?;
        for p in &self.points {
            w.write_record([
                format!("{:.12e}", p.sigma),
                format!("{:.12e}", p.mean_abs_error),
                p.n_samples.to_string(),
                p.n_nonconverged.to_string(),
            ])
            .map_err(|e| SplitccError::InvalidInput(e.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci::{Determinant, ExcitationLabel, OverlapEntry};
    use std::collections::BTreeMap;

    fn toy_overlaps(n_entries: usize) -> OverlapSet {
        let reference = Determinant::from_occupied(&[0, 4], 4);
        let mut entries = BTreeMap::new();
        for a in 0..n_entries {
            let label = ExcitationLabel::new(vec![0], vec![1 + (a % 3)]);
            entries.entry(label).or_insert(OverlapEntry {
                value: 0.0,
                variance: None,
            });
        }
        OverlapSet {
            reference,
            n_spatial: 4,
            c0: 1.0,
            c0_variance: None,
            entries,
        }
    }

    #[test]
    fn shot_variance_arithmetic() {
        assert!((variance_from_shots(8, 2000).unwrap() - 0.002).abs() < 1e-15);
        assert!((variance_from_shots(12, 1).unwrap() - f64::sqrt(24.0)).abs() < 1e-12);
        // quadrupling the shots halves sigma
        let s1 = variance_from_shots(10, 500).unwrap().sqrt();
        let s4 = variance_from_shots(10, 2000).unwrap().sqrt();
        assert!((s1 / s4 - 2.0).abs() < 1e-12);
        assert!(variance_from_shots_with_filling(8, 3, 100).is_err());
        assert!(variance_from_shots_with_filling(8, 4, 100).is_ok());
    }

    #[test]
    fn zero_sigma_identity_and_determinism() {
        let ov = toy_overlaps(3);
        let spec = NoiseSpec {
            source: NoiseSource::Sigma(0.0),
            seed: 7,
        };
        let out = perturb_overlaps(&ov, &spec).unwrap();
        assert_eq!(out.c0, ov.c0);
        assert!(out.entries.values().all(|e| e.variance.is_none()));

        let spec = NoiseSpec {
            source: NoiseSource::Sigma(0.01),
            seed: 7,
        };
        let a = perturb_overlaps(&ov, &spec).unwrap();
        let b = perturb_overlaps(&ov, &spec).unwrap();
        assert_eq!(a.c0, b.c0);
        for (x, y) in a.entries.values().zip(b.entries.values()) {
            assert_eq!(x.value, y.value);
            assert_eq!(x.variance, Some(1e-4));
        }
    }

    #[test]
    fn perturbation_scale_matches_sigma() {
        // many independent seeds on a zero-valued entry set
        let ov = toy_overlaps(3);
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        for seed in 0..4000u64 {
            let spec = NoiseSpec {
                source: NoiseSource::Sigma(0.01),
                seed,
            };
            let out = perturb_overlaps(&ov, &spec).unwrap();
            for e in out.entries.values() {
                sum_sq += e.value * e.value;
                count += 1;
            }
        }
        let sd = (sum_sq / count as f64).sqrt();
        assert!((sd - 0.01).abs() < 0.0003, "sampled sd {sd}");
    }

    #[test]
    fn exact_power_laws_recovered() {
        let pts: Vec<(f64, f64)> = [1e-4, 1e-3, 1e-2].iter().map(|&s| (s, 3.0 * s)).collect();
        let (beta, _) = fit_sigma_exponent(&pts, 50, 1).unwrap();
        assert!((beta - 1.0).abs() < 1e-12);

        let pts: Vec<(f64, f64)> = [1e-4f64, 1e-3, 1e-2, 1e-1]
            .iter()
            .map(|&s| (s, 2.0 * s.sqrt()))
            .collect();
        let (beta, _) = fit_sigma_exponent(&pts, 50, 1).unwrap();
        assert!((beta - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fit_input_validation() {
        assert!(fit_sigma_exponent(&[(1e-3, 1.0), (1e-2, 2.0)], 10, 0).is_err());
        // narrow span rejected
        assert!(fit_sigma_exponent(&[(1e-3, 1.0), (2e-3, 2.0), (4e-3, 3.0)], 10, 0).is_err());
        // nonpositive values rejected
        assert!(fit_sigma_exponent(&[(1e-4, 1.0), (1e-3, 0.0), (1e-2, 2.0)], 10, 0).is_err());
    }
}

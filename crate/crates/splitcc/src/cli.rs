//! Command-line orchestration: every library workflow as a subcommand, with
//! an optional JSON run-spec file supplying defaults (explicit flags win).
//!
//! Exit codes: 0 success, 2 input error, 3 solver non-convergence,
//! 4 precondition violation.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cc::{
    diagnostics, solve_ccsd, solve_eccc, solve_tccsd, CCResult, SolverConfig, TCCResult,
};
use crate::ci::{enumerate_determinants, extract_overlaps, solve_ci, CIVector, OverlapSet};
use crate::cluster::{ci_to_cc, drop_disconnected, embed_active, filter_variance, AmplitudeSet};
use crate::error::{Result, SplitccError};
use crate::estimator::{
    count_overlaps, fit_power_law, prefactor_from_t1diag, shot_budget, FitRecord, OverlapMethod,
    PowerLawModel, ShotBudgetQuery,
};
use crate::integrals::{
    build_active_hamiltonian, build_fock, read_fcidump, to_spin_orbitals, ActiveSpaceSpec,
    Ordering, SpinOrbitalBasis,
};
use crate::io::{
    read_amplitudes_file, read_overlaps_file, write_amplitudes_file, write_civector_file,
    write_overlaps_file,
};
use crate::noise::{run_noise_study, variance_from_shots, NoiseSpec, Workflow};

/// Round to 12 significant digits for stable, regression-friendly output.
fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Parser, Debug)]
#[command(
    name = "splitcc",
    about = "Split-amplitude coupled cluster (TCCSD / ec-CC) from externally supplied \
             wavefunction overlaps, with shot-noise modeling and measurement budgeting",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print reference-determinant mean-field data from an FCIDUMP
    ScfInfo(ScfInfoArgs),
    /// Exact diagonalization (FCI / CASCI) with optional overlap export
    Casci(CasciArgs),
    /// Plain CCSD
    Ccsd(CcsdArgs),
    /// Tailored CCSD: active-space T1/T2 frozen from a CAS wavefunction
    Tccsd(TccsdArgs),
    /// Externally corrected CC: frozen T3/T4 in the singles/doubles projections
    Eccc(EcccArgs),
    /// Gaussian-noise response study over a sigma grid
    NoiseSweep(NoiseSweepArgs),
    /// Measurement budget for a target energy error
    ShotBudget(ShotBudgetArgs),
    /// Number of determinant overlaps a split-amplitude method consumes
    CountOverlaps(CountOverlapsArgs),
    /// Fit the power-law error model to a noise-study dataset
    FitPowerlaw(FitPowerlawArgs),
    /// Batch energies over several run specs into a long-format CSV
    Curve(CurveArgs),
}

/// JSON run-spec file: every field optional; explicit CLI flags override.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RunSpec {
    pub command: Option<String>,
    pub label: Option<String>,
    pub fcidump_path: Option<PathBuf>,
    pub active_space: Option<ActiveSpaceSpec>,
    pub overlaps_path: Option<PathBuf>,
    pub solver: Option<SolverConfig>,
    pub noise: Option<NoiseSpec>,
    pub output_path: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunSpec {
    pub fn load(path: &Path) -> Result<RunSpec> {
        Ok(serde_json::from_reader(std::io::BufReader::new(
            std::fs::File::open(path)?,
        ))?)
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// JSON run-spec file supplying defaults for any omitted flag
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// FCIDUMP file (plain or .gz)
    #[arg(long)]
    pub fcidump: Option<PathBuf>,
    /// Write the JSON/CSV result here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub residual_tolerance: Option<f64>,
    #[arg(long)]
    pub diis_depth: Option<usize>,
    #[arg(long)]
    pub level_shift: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct CasArgs {
    /// Active space as three numbers: spatial orbitals, alpha, beta electrons
    #[arg(long, num_args = 3, value_names = ["NORB", "NALPHA", "NBETA"])]
    pub cas: Option<Vec<usize>>,
    /// Explicit active spatial orbitals (default: window around the Fermi level)
    #[arg(long, value_delimiter = ',')]
    pub active_orbitals: Option<Vec<usize>>,
}

struct Resolved {
    spec: RunSpec,
    fcidump: Option<PathBuf>,
    output: Option<PathBuf>,
    solver: SolverConfig,
}

fn resolve(common: &CommonArgs) -> Result<Resolved> {
    let spec = match &common.spec {
        Some(p) => RunSpec::load(p)?,
        None => RunSpec::default(),
    };
    let mut solver = spec.solver.clone().unwrap_or_default();
    if let Some(v) = common.max_iterations {
        solver.max_iterations = v;
    }
    if let Some(v) = common.residual_tolerance {
        solver.residual_tolerance = v;
    }
    if let Some(v) = common.diis_depth {
        solver.diis_depth = v;
    }
    if let Some(v) = common.level_shift {
        solver.level_shift = v;
    }
    Ok(Resolved {
        fcidump: common.fcidump.clone().or_else(|| spec.fcidump_path.clone()),
        output: common.output.clone().or_else(|| spec.output_path.clone()),
        solver,
        spec,
    })
}

fn load_basis(r: &Resolved) -> Result<SpinOrbitalBasis> {
    let path = r.fcidump.as_deref().ok_or_else(|| {
        SplitccError::InvalidInput("an FCIDUMP path is required (--fcidump)".into())
    })?;
    to_spin_orbitals(&read_fcidump(path)?, Ordering::Blocked)
}

/// Resolve --cas/--active-orbitals (or the run-spec active space) against the
/// reference occupation; `None` when no active space was requested.
fn resolve_active_space(
    cas: &CasArgs,
    spec: &RunSpec,
    basis: &SpinOrbitalBasis,
) -> Result<Option<ActiveSpaceSpec>> {
    if cas.cas.is_none() && cas.active_orbitals.is_none() {
        return Ok(spec.active_space.clone());
    }
    let ns = basis.n / 2;
    let n_occ_spatial = basis.reference_occupation.len() / 2;
    let (norb, na, nb) = match &cas.cas {
        Some(v) => (v[0], v[1], v[2]),
        None => {
            return Err(SplitccError::InvalidInput(
                "--active-orbitals requires --cas for the electron counts".into(),
            ))
        }
    };
    let orbitals = match &cas.active_orbitals {
        Some(list) => {
            if list.len() != norb {
                return Err(SplitccError::InvalidInput(format!(
                    "--active-orbitals lists {} orbitals but --cas says {norb}",
                    list.len()
                )));
            }
            list.clone()
        }
        None => {
            // contiguous window: the highest doubly occupied orbitals plus the
            // lowest virtuals
            let n_active_occ = (na + nb).div_ceil(2);
            if n_active_occ > n_occ_spatial || norb < n_active_occ {
                return Err(SplitccError::InvalidInput(format!(
                    "CAS({norb}, {}) does not fit the {n_occ_spatial} occupied spatial orbitals",
                    na + nb
                )));
            }
            let start = n_occ_spatial - n_active_occ;
            if start + norb > ns {
                return Err(SplitccError::InvalidInput(format!(
                    "CAS window {start}..{} exceeds the {ns} spatial orbitals",
                    start + norb
                )));
            }
            (start..start + norb).collect()
        }
    };
    Ok(Some(ActiveSpaceSpec {
        active_spatial_orbitals: orbitals,
        n_active_alpha: na,
        n_active_beta: nb,
    }))
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                f.write_all(b"\n")?;
            }
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_json(output: Option<&Path>, value: &serde_json::Value) -> Result<()> {
    emit(output, &serde_json::to_string_pretty(value)?)
}

// ---------------------------------------------------------------------------
// scf-info

#[derive(Args, Debug)]
pub struct ScfInfoArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

fn run_scf_info(args: &ScfInfoArgs) -> Result<()> {
    let r = resolve(&args.common)?;
    let basis = load_basis(&r)?;
    let (fock, e_hf) = build_fock(&basis);
    let diag: Vec<f64> = (0..basis.n).map(|p| sig12(fock[(p, p)])).collect();
    let occ: std::collections::HashSet<usize> =
        basis.reference_occupation.iter().copied().collect();
    let mut max_ov = 0.0f64;
    for &i in &basis.reference_occupation {
        for a in (0..basis.n).filter(|p| !occ.contains(p)) {
            max_ov = max_ov.max(fock[(i, a)].abs());
        }
    }
    emit_json(
        r.output.as_deref(),
        &json!({
            "n_spin_orbitals": basis.n,
            "n_electrons": basis.reference_occupation.len(),
            "e_core": sig12(basis.e_core),
            "e_hf": sig12(e_hf),
            "fock_diagonal": diag,
            "max_occupied_virtual_fock": sig12(max_ov),
        }),
    )
}

// ---------------------------------------------------------------------------
// casci

#[derive(Args, Debug)]
pub struct CasciArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub cas: CasArgs,
    /// Number of eigenstates to solve for
    #[arg(long, default_value_t = 1)]
    pub n_roots: usize,
    /// Highest excitation rank kept in exported overlaps
    #[arg(long, default_value_t = 2)]
    pub max_rank: usize,
    /// Write ground-state overlaps (quantum-input format) here
    #[arg(long)]
    pub overlaps_out: Option<PathBuf>,
    /// Write the ground-state CI vector here
    #[arg(long)]
    pub state_out: Option<PathBuf>,
}

/// CASCI in the requested active space (or full FCI); total energies include
/// the inactive mean field.
fn solve_cas_state(
    basis: &SpinOrbitalBasis,
    active: Option<&ActiveSpaceSpec>,
    n_roots: usize,
) -> Result<(Vec<f64>, Vec<CIVector>)> {
    let (work_basis, _) = match active {
        Some(spec) => build_active_hamiltonian(basis, spec)?,
        None => (basis.clone(), basis.e_core),
    };
    let ns = work_basis.n / 2;
    let na = work_basis
        .reference_occupation
        .iter()
        .filter(|&&p| p < ns)
        .count();
    let nb = work_basis.reference_occupation.len() - na;
    let dets = enumerate_determinants(ns, na, nb, None, None)?;
    solve_ci(&work_basis, &dets, n_roots)
}

fn run_casci(args: &CasciArgs) -> Result<()> {
    let r = resolve(&args.common)?;
    let basis = load_basis(&r)?;
    let active = resolve_active_space(&args.cas, &r.spec, &basis)?;
    let (energies, states) = solve_cas_state(&basis, active.as_ref(), args.n_roots)?;
    let ov = extract_overlaps(&states[0], args.max_rank, None)?;
    if let Some(path) = &args.overlaps_out {
        write_overlaps_file(path, &ov)?;
    }
    if let Some(path) = &args.state_out {
        write_civector_file(path, &states[0])?;
    }
    emit_json(
        r.output.as_deref(),
        &json!({
            "energies": energies.iter().map(|&e| sig12(e)).collect::<Vec<_>>(),
            "c0": sig12(ov.c0),
            "n_overlaps": ov.entries.len(),
            "active_space": active,
        }),
    )
}

// ---------------------------------------------------------------------------
// ccsd

#[derive(Args, Debug)]
pub struct CcsdArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Write converged amplitudes (label format) here
    #[arg(long)]
    pub amplitudes_out: Option<PathBuf>,
}

fn cc_result_json(res: &CCResult, n_electrons: usize) -> Result<serde_json::Value> {
    let (t1_diag, d1_diag) = diagnostics(&res.amplitudes.t1, n_electrons)?;
    Ok(json!({
        "e_total": sig12(res.e_total),
        "e_correlation": sig12(res.e_correlation),
        "e_hf": sig12(res.e_hf),
        "iterations": res.iterations,
        "final_residual_norm": sig12(res.final_residual_norm),
        "converged": res.converged,
        "t1_diag": sig12(t1_diag),
        "d1_diag": sig12(d1_diag),
    }))
}

fn run_ccsd(args: &CcsdArgs) -> Result<()> {
    let r = resolve(&args.common)?;
    let basis = load_basis(&r)?;
    let res = solve_ccsd(&basis, &r.solver, None)?;
    if let Some(path) = &args.amplitudes_out {
        write_amplitudes_file(path, &res.amplitudes, 1e-14)?;
    }
    let value = cc_result_json(&res, basis.reference_occupation.len())?;
    emit_json(r.output.as_deref(), &value)
}

// ---------------------------------------------------------------------------
// tccsd

#[derive(Args, Debug)]
pub struct TccsdArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub cas: CasArgs,
    /// Externally measured active-space overlaps (quantum input); when
    /// omitted, overlaps come from an internal CASCI
    #[arg(long)]
    pub overlaps: Option<PathBuf>,
    /// Write converged amplitudes (label format) here
    #[arg(long)]
    pub amplitudes_out: Option<PathBuf>,
}

fn tcc_result_json(res: &TCCResult, n_electrons: usize) -> Result<serde_json::Value> {
    let mut value = cc_result_json(&res.base, n_electrons)?;
    value["e_as"] = json!(sig12(res.e_as));
    value["e_ext"] = json!(sig12(res.e_ext));
    Ok(value)
}

fn active_overlaps(
    basis: &SpinOrbitalBasis,
    active: &ActiveSpaceSpec,
    overlaps_path: Option<&Path>,
    max_rank: usize,
) -> Result<OverlapSet> {
    match overlaps_path {
        Some(path) => {
            let ov = read_overlaps_file(path)?;
            if ov.n_spatial != active.active_spatial_orbitals.len() {
                return Err(SplitccError::InvalidInput(format!(
                    "overlap file covers {} spatial orbitals but the active space has {}",
                    ov.n_spatial,
                    active.active_spatial_orbitals.len()
                )));
            }
            Ok(ov)
        }
        None => {
            let (energies, states) = solve_cas_state(basis, Some(active), 1)?;
            let _ = energies;
            extract_overlaps(&states[0], max_rank, None)
        }
    }
}

fn run_tccsd(args: &TccsdArgs) -> Result<()> {
    let r = resolve(&args.common)?;
    let basis = load_basis(&r)?;
    let overlaps_path = args
        .overlaps
        .clone()
        .or_else(|| r.spec.overlaps_path.clone());
    let active = resolve_active_space(&args.cas, &r.spec, &basis)?.ok_or_else(|| {
        SplitccError::InvalidInput("tccsd needs an active space (--cas or run spec)".into())
    })?;
    let ov = active_overlaps(&basis, &active, overlaps_path.as_deref(), 2)?;
    let amps = ci_to_cc(&ov, 2)?;
    let frozen = embed_active(&amps, &active, &basis, true)?;
    let res = solve_tccsd(&basis, &r.solver, &frozen)?;
    if let Some(path) = &args.amplitudes_out {
        write_amplitudes_file(path, &res.base.amplitudes, 1e-14)?;
    }
    let value = tcc_result_json(&res, basis.reference_occupation.len())?;
    emit_json(r.output.as_deref(), &value)
}

// ---------------------------------------------------------------------------
// eccc

#[derive(Args, Debug)]
pub struct EcccArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub cas: CasArgs,
    /// Externally measured overlaps through rank 4 (quantum input); active-space
    /// labels when an active space is given, full-space labels otherwise.
    /// When omitted, overlaps come from an internal CASCI/FCI
    #[arg(long)]
    pub overlaps: Option<PathBuf>,
    /// Externally supplied amplitudes (label format) instead of overlaps
    #[arg(long)]
    pub amplitudes: Option<PathBuf>,
    /// Type-II: discard purely disconnected T3/T4 before solving
    #[arg(long)]
    pub type2: bool,
    /// Zero overlaps with |value| <= k * sigma before cluster analysis
    #[arg(long)]
    pub filter_k: Option<f64>,
    /// CI coefficients below this magnitude count as zero
    #[arg(long, default_value_t = 1e-12)]
    pub ci_zero_threshold: f64,
}

fn run_eccc(args: &EcccArgs) -> Result<()> {
    let r = resolve(&args.common)?;
    let basis = load_basis(&r)?;
    let overlaps_path = args
        .overlaps
        .clone()
        .or_else(|| r.spec.overlaps_path.clone());
    let active = resolve_active_space(&args.cas, &r.spec, &basis)?;

    let external: AmplitudeSet = if let Some(path) = &args.amplitudes {
        read_amplitudes_file(path)?
    } else {
        let mut ov = match (&overlaps_path, &active) {
            (Some(path), _) => read_overlaps_file(path)?,
            (None, active) => {
                let (_, states) = solve_cas_state(&basis, active.as_ref(), 1)?;
                extract_overlaps(&states[0], 4, None)?
            }
        };
        if let Some(k) = args.filter_k {
            ov = filter_variance(&ov, k, false)?.0;
        }
        let amps = ci_to_cc(&ov, 4)?;
        let amps = if args.type2 {
            drop_disconnected(
                &amps,
                &ov,
                args.ci_zero_threshold,
                args.filter_k.unwrap_or(0.0),
            )
            .0
        } else {
            amps
        };
        match &active {
            Some(spec) => embed_active(&amps, spec, &basis, false)?,
            None => amps,
        }
    };
    let res = solve_eccc(&basis, &external, &r.solver)?;
    let value = cc_result_json(&res, basis.reference_occupation.len())?;
    emit_json(r.output.as_deref(), &value)
}

// ---------------------------------------------------------------------------
// noise-sweep

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum WorkflowKind {
    Tccsd,
    Eccc,
}

#[derive(Args, Debug)]
pub struct NoiseSweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub cas: CasArgs,
    /// Overlap noise levels
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub sigma: Option<Vec<f64>>,
    /// Shot counts (converted to sigma via the half-filling variance bound)
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub shots: Option<Vec<u64>>,
    /// Qubit count for the shots-to-sigma conversion
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long, value_enum, default_value_t = WorkflowKind::Tccsd)]
    pub workflow: WorkflowKind,
    #[arg(long, default_value_t = 30)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bootstrap resamples for the exponent error bar
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    /// Variance-filter significance multiple for the eccc workflow
    #[arg(long, default_value_t = 0.0)]
    pub filter_k: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub ci_zero_threshold: f64,
    /// Write per-sigma CSV rows here (summary JSON goes to --output/stdout)
    #[arg(long)]
    pub csv_out: Option<PathBuf>,
}

fn run_noise_sweep(args: &NoiseSweepArgs) -> Result<()> {
    let r = resolve(&args.common)?;
    let basis = load_basis(&r)?;
    let active = resolve_active_space(&args.cas, &r.spec, &basis)?.ok_or_else(|| {
        SplitccError::InvalidInput("noise-sweep needs an active space (--cas or run spec)".into())
    })?;
    let sigma_grid: Vec<f64> = match (&args.sigma, &args.shots) {
        (Some(s), None) => s.clone(),
        (None, Some(shots)) => {
            let n = args.qubits.ok_or_else(|| {
                SplitccError::InvalidInput("--shots needs --qubits for the variance bound".into())
            })?;
            shots
                .iter()
                .map(|&s| variance_from_shots(n, s).map(f64::sqrt))
                .collect::<Result<_>>()?
        }
        (None, None) => {
            if let Some(noise) = &r.spec.noise {
                vec![noise.sigma()?]
            } else {
                return Err(SplitccError::InvalidInput(
                    "a sigma grid is required (--sigma or --shots)".into(),
                ));
            }
        }
        (Some(_), Some(_)) => {
            return Err(SplitccError::InvalidInput(
                "--sigma and --shots are mutually exclusive".into(),
            ))
        }
    };
    let seed = args
        .seed
        .or(r.spec.seed)
        .or_else(|| r.spec.noise.as_ref().map(|n| n.seed))
        .unwrap_or(0);
    let (max_rank, workflow) = match args.workflow {
        WorkflowKind::Tccsd => (
            2,
            Workflow::Tccsd {
                active_space: active.clone(),
            },
        ),
        WorkflowKind::Eccc => (
            4,
            Workflow::Eccc {
                active_space: active.clone(),
                variance_filter_k: args.filter_k,
                ci_zero_threshold: args.ci_zero_threshold,
            },
        ),
    };
    let (_, states) = solve_cas_state(&basis, Some(&active), 1)?;
    let exact = extract_overlaps(&states[0], max_rank, None)?;
    let study = run_noise_study(
        &workflow,
        &basis,
        &exact,
        &sigma_grid,
        args.samples,
        seed,
        args.bootstrap,
        &r.solver,
    )?;
    if let Some(path) = &args.csv_out {
        study.write_csv(std::fs::File::create(path)?)?;
    }
    emit_json(
        r.output.as_deref(),
        &json!({
            "beta_sigma": sig12(study.beta_sigma),
            "beta_sigma_error": sig12(study.beta_sigma_error),
            "points": study.points.iter().map(|p| json!({
                "sigma": sig12(p.sigma),
                "mean_abs_error": sig12(p.mean_abs_error),
                "n_samples": p.n_samples,
                "n_nonconverged": p.n_nonconverged,
            })).collect::<Vec<_>>(),
            "seed": seed,
        }),
    )
}

// ---------------------------------------------------------------------------
// shot-budget

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum MethodKind {
    Tccsd,
    Eccc,
}

impl From<MethodKind> for OverlapMethod {
    fn from(m: MethodKind) -> Self {
        match m {
            MethodKind::Tccsd => OverlapMethod::Tccsd,
            MethodKind::Eccc => OverlapMethod::Eccc,
        }
    }
}

#[derive(Args, Debug)]
pub struct ShotBudgetArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// CCSD T1 diagnostic of the target system (single-query mode)
    #[arg(long)]
    pub t1_diag: Option<f64>,
    /// CSV with label,t1_diag rows (batch mode; emits label,t1_diag,s rows)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Target energy error in Hartree
    #[arg(long, default_value_t = 1e-3)]
    pub target_error: f64,
    /// Overlap count; derived from --cas/--method when omitted
    #[arg(long)]
    pub d: Option<u64>,
    #[command(flatten)]
    pub cas: CasArgs,
    #[arg(long, value_enum, default_value_t = MethodKind::Tccsd)]
    pub method: MethodKind,
    /// Total spin-orbital count N of the orbital space
    #[arg(long)]
    pub n_spin_orbitals: u64,
    /// Qubit count n of the overlap measurement register
    #[arg(long)]
    pub qubits: u64,
}

fn budget_query(args: &ShotBudgetArgs, t1_diag: f64) -> Result<ShotBudgetQuery> {
    let d = match (args.d, &args.cas.cas) {
        (Some(d), _) => d,
        (None, Some(cas)) => count_overlaps(cas[0], cas[1], cas[2], args.method.into())?,
        (None, None) => {
            return Err(SplitccError::InvalidInput(
                "an overlap count is required (--d or --cas)".into(),
            ))
        }
    };
    Ok(ShotBudgetQuery {
        t1_diag,
        target_error: args.target_error,
        d,
        n_total_spin_orbitals: args.n_spin_orbitals,
        n_qubits: args.qubits,
        assume_half_filling: true,
    })
}

fn run_shot_budget(args: &ShotBudgetArgs) -> Result<()> {
    let r = resolve(&args.common)?;
    let model = PowerLawModel::default();
    match (&args.input, args.t1_diag) {
        (Some(path), _) => {
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(true)
                .from_path(path)
                .map_err(|e| SplitccError::Parse(e.to_string()))?;
            let mut lines = vec!["label,t1_diag,s".to_string()];
            let mut total = 0u64;
            for row in reader.records() {
                let row = row.map_err(|e| SplitccError::Parse(e.to_string()))?;
                if row.len() < 2 {
                    return Err(SplitccError::Parse(
                        "budget input rows need label,t1_diag columns".into(),
                    ));
                }
                let label = row[0].to_string();
                let t1: f64 = row[1]
                    .trim()
                    .parse()
                    .map_err(|e| SplitccError::Parse(format!("bad t1_diag for '{label}': {e}")))?;
                let (s, _, _) = shot_budget(&budget_query(args, t1)?, &model)?;
                total += s;
                lines.push(format!("{label},{t1},{s}"));
            }
            lines.push(format!("total,,{total}"));
            emit(r.output.as_deref(), &lines.join("\n"))
        }
        (None, Some(t1)) => {
            let query = budget_query(args, t1)?;
            let (s, s_low, s_high) = shot_budget(&query, &model)?;
            emit_json(
                r.output.as_deref(),
                &json!({
                    "t1_diag": sig12(t1),
                    "prefactor_a": sig12(prefactor_from_t1diag(t1)),
                    "d": query.d,
                    "n_spin_orbitals": query.n_total_spin_orbitals,
                    "n_qubits": query.n_qubits,
                    "target_error": sig12(query.target_error),
                    "shots": s,
                    "shots_low": s_low,
                    "shots_high": s_high,
                }),
            )
        }
        (None, None) => Err(SplitccError::InvalidInput(
            "shot-budget needs --t1-diag or --input".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// count-overlaps

#[derive(Args, Debug)]
pub struct CountOverlapsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Active space as three numbers: spatial orbitals, alpha, beta electrons
    #[arg(long, num_args = 3, value_names = ["NORB", "NALPHA", "NBETA"], required = true)]
    pub cas: Vec<usize>,
    #[arg(long, value_enum, default_value_t = MethodKind::Tccsd)]
    pub method: MethodKind,
}

fn run_count_overlaps(args: &CountOverlapsArgs) -> Result<()> {
    let r = resolve(&args.common)?;
    let d = count_overlaps(args.cas[0], args.cas[1], args.cas[2], args.method.into())?;
    emit(r.output.as_deref(), &d.to_string())
}

// ---------------------------------------------------------------------------
// fit-powerlaw

#[derive(Args, Debug)]
pub struct FitPowerlawArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// CSV with label,d,N,sigma,mean_abs_error rows
    #[arg(long, required = true)]
    pub input: PathBuf,
    /// Bootstrap resamples for exponent error bars
    #[arg(long, default_value_t = 200)]
    pub bootstrap: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

pub fn read_fit_records(path: &Path) -> Result<Vec<FitRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| SplitccError::Parse(e.to_string()))?;
    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| SplitccError::Parse(e.to_string()))?;
        if row.len() < 5 {
            return Err(SplitccError::Parse(
                "fit input rows need label,d,N,sigma,mean_abs_error columns".into(),
            ));
        }
        let parse_u = |s: &str| -> Result<u64> {
            s.parse::<f64>()
                .map(|x| x.round() as u64)
                .map_err(|e| SplitccError::Parse(format!("bad integer '{s}': {e}")))
        };
        let parse_f = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|e| SplitccError::Parse(format!("bad number '{s}': {e}")))
        };
        records.push(FitRecord {
            label: row[0].to_string(),
            d: parse_u(&row[1])?,
            n_total_spin_orbitals: parse_u(&row[2])?,
            sigma: parse_f(&row[3])?,
            mean_abs_error: parse_f(&row[4])?,
        });
    }
    Ok(records)
}

fn run_fit_powerlaw(args: &FitPowerlawArgs) -> Result<()> {
    let r = resolve(&args.common)?;
    let records = read_fit_records(&args.input)?;
    let seed = args.seed.or(r.spec.seed).unwrap_or(0);
    let model = fit_power_law(&records, args.bootstrap, seed)?;
    let prefactors: BTreeMap<&String, f64> = model
        .per_label_prefactors
        .iter()
        .map(|(k, &v)| (k, sig12(v)))
        .collect();
    emit_json(
        r.output.as_deref(),
        &json!({
            "beta": sig12(model.beta),
            "beta_err": sig12(model.beta_err),
            "gamma": sig12(model.gamma),
            "gamma_err": sig12(model.gamma_err),
            "per_label_prefactors": prefactors,
            "n_records": records.len(),
            "seed": seed,
        }),
    )
}

// ---------------------------------------------------------------------------
// curve

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// JSON array of run specs; each needs label, command (casci/ccsd/tccsd/
    /// eccc), fcidump_path, and an active space where applicable
    #[arg(long, required = true)]
    pub specs: PathBuf,
}

/// Total energy, correlation energy, and the (e_as, e_ext) split when the
/// method provides one.
type CurveRow = (f64, f64, Option<(f64, f64)>);

fn curve_row(spec: &RunSpec, solver: &SolverConfig) -> Result<CurveRow> {
    let fcidump = spec
        .fcidump_path
        .as_deref()
        .ok_or_else(|| SplitccError::InvalidInput("curve entry missing fcidump_path".into()))?;
    let basis = to_spin_orbitals(&read_fcidump(fcidump)?, Ordering::Blocked)?;
    let method = spec.command.as_deref().unwrap_or("ccsd");
    match method {
        "ccsd" => {
            let res = solve_ccsd(&basis, solver, None)?;
            Ok((res.e_total, res.e_correlation, None))
        }
        "casci" => {
            let (energies, _) = solve_cas_state(&basis, spec.active_space.as_ref(), 1)?;
            let (_, e_hf) = build_fock(&basis);
            Ok((energies[0], energies[0] - e_hf, None))
        }
        "tccsd" => {
            let active = spec.active_space.clone().ok_or_else(|| {
                SplitccError::InvalidInput("tccsd curve entry missing active_space".into())
            })?;
            let ov = active_overlaps(&basis, &active, spec.overlaps_path.as_deref(), 2)?;
            let amps = ci_to_cc(&ov, 2)?;
            let frozen = embed_active(&amps, &active, &basis, true)?;
            let res = solve_tccsd(&basis, solver, &frozen)?;
            Ok((
                res.base.e_total,
                res.base.e_correlation,
                Some((res.e_as, res.e_ext)),
            ))
        }
        "eccc" => {
            let mut ov = match (&spec.overlaps_path, &spec.active_space) {
                (Some(path), _) => read_overlaps_file(path)?,
                (None, active) => {
                    let (_, states) = solve_cas_state(&basis, active.as_ref(), 1)?;
                    extract_overlaps(&states[0], 4, None)?
                }
            };
            let _ = &mut ov;
            let amps = ci_to_cc(&ov, 4)?;
            let full = match &spec.active_space {
                Some(active) => embed_active(&amps, active, &basis, false)?,
                None => amps,
            };
            let res = solve_eccc(&basis, &full, solver)?;
            Ok((res.e_total, res.e_correlation, None))
        }
        other => Err(SplitccError::InvalidInput(format!(
            "unknown curve method '{other}' (expected casci, ccsd, tccsd, or eccc)"
        ))),
    }
}

fn run_curve(args: &CurveArgs) -> Result<()> {
    let r = resolve(&args.common)?;
    let specs: Vec<RunSpec> =
        serde_json::from_reader(std::io::BufReader::new(std::fs::File::open(&args.specs)?))?;
    let mut lines = vec!["label,method,e_total,e_correlation,e_as,e_ext,status".to_string()];
    for (i, spec) in specs.iter().enumerate() {
        let label = spec.label.clone().unwrap_or_else(|| i.to_string());
        let method = spec.command.clone().unwrap_or_else(|| "ccsd".into());
        let solver = spec.solver.clone().unwrap_or_else(|| r.solver.clone());
        match curve_row(spec, &solver) {
            Ok((e_total, e_corr, split)) => {
                let (e_as, e_ext) = match split {
                    Some((a, x)) => (format!("{:.12e}", sig12(a)), format!("{:.12e}", sig12(x))),
                    None => (String::new(), String::new()),
                };
                lines.push(format!(
                    "{label},{method},{:.12e},{:.12e},{e_as},{e_ext},ok",
                    sig12(e_total),
                    sig12(e_corr)
                ));
            }
            Err(err) => {
                let msg = err.to_string().replace([',', '\n'], ";");
                lines.push(format!("{label},{method},,,,,{msg}"));
            }
        }
    }
    emit(r.output.as_deref(), &lines.join("\n"))
}

// ---------------------------------------------------------------------------

pub fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::ScfInfo(a) => run_scf_info(a),
        Command::Casci(a) => run_casci(a),
        Command::Ccsd(a) => run_ccsd(a),
        Command::Tccsd(a) => run_tccsd(a),
        Command::Eccc(a) => run_eccc(a),
        Command::NoiseSweep(a) => run_noise_sweep(a),
        Command::ShotBudget(a) => run_shot_budget(a),
        Command::CountOverlaps(a) => run_count_overlaps(a),
        Command::FitPowerlaw(a) => run_fit_powerlaw(a),
        Command::Curve(a) => run_curve(a),
    }
}

/// Entry point for the thin binary: parse, run, translate errors to exit codes.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

//! Black-box checks of the command-line binary: exit codes, JSON output, and
//! the equivalence of file-supplied and internally generated overlaps.

use std::path::Path;
use std::process::{Command, Output};

fn splitcc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_splitcc"))
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("../.."))
        .args(args)
        .output()
        .expect("failed to launch binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

#[test]
fn count_overlaps_matches_published_values() {
    let out = splitcc(&["count-overlaps", "--cas", "6", "3", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "118");

    let out = splitcc(&["count-overlaps", "--cas", "6", "3", "3", "--method", "eccc"]);
    assert_eq!(stdout(&out), "381");
}

#[test]
fn missing_input_file_exits_2() {
    let out = splitcc(&["ccsd", "--fcidump", "no_such_file.fcidump"]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn bad_flags_exit_2() {
    let out = splitcc(&["count-overlaps"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn vanishing_reference_coefficient_exits_4() {
    // the (2e,2o) window of square H4 holds a degenerate open-shell pair; its
    // CASCI ground state has c0 = 0 and must be rejected, not silently used
    let out = splitcc(&[
        "tccsd",
        "--fcidump",
        "fixtures/h4_sto3g.fcidump",
        "--cas",
        "3",
        "2",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn nonconvergence_exits_3() {
    let out = splitcc(&[
        "ccsd",
        "--fcidump",
        "fixtures/h4_sto3g.fcidump",
        "--max-iterations",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn ccsd_json_output() {
    let out = splitcc(&["ccsd", "--fcidump", "fixtures/h2_sto3g.fcidump"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let e = v["e_total"].as_f64().unwrap();
    assert!((e - (-1.1372701752)).abs() < 1e-8, "e_total = {e}");
    assert!(v["converged"].as_bool().unwrap());
}

#[test]
fn file_overlaps_match_internal_casci() {
    let dir = tempfile::tempdir().unwrap();
    let ov_path = dir.path().join("overlaps.jsonl");
    let ov = ov_path.to_str().unwrap();

    let out = splitcc(&[
        "casci",
        "--fcidump",
        "fixtures/h4_sto3g.fcidump",
        "--cas",
        "4",
        "2",
        "2",
        "--overlaps-out",
        ov,
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );

    let base = &[
        "tccsd",
        "--fcidump",
        "fixtures/h4_sto3g.fcidump",
        "--cas",
        "4",
        "2",
        "2",
    ];
    let internal = splitcc(base);
    assert_eq!(internal.status.code(), Some(0));
    let mut with_file: Vec<&str> = base.to_vec();
    with_file.extend_from_slice(&["--overlaps", ov]);
    let external = splitcc(&with_file);
    assert_eq!(
        external.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&external.stderr)
    );

    assert_eq!(
        stdout(&internal),
        stdout(&external),
        "overlap source changed the result"
    );
}

#[test]
fn shot_budget_single_query() {
    let out = splitcc(&[
        "shot-budget",
        "--t1-diag",
        "0.003975",
        "--cas",
        "6",
        "3",
        "3",
        "--n-spin-orbitals",
        "56",
        "--qubits",
        "12",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["d"].as_u64(), Some(118));
    let s = v["shots"].as_u64().unwrap() as f64;
    assert!((s - 5231.0).abs() / 5231.0 < 0.05, "shots = {s}");
}

//! End-to-end tests of the `klein-systolic` binary: output formats, JSON
//! envelopes, file round trips, and exit codes.

use serde_json::Value;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_klein-systolic");

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

/// Run with `--json` and parse the envelope, asserting exit code 0.
fn run_json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "args {args:?} failed: {stderr}");
    serde_json::from_str(&stdout).expect("valid JSON envelope")
}

/// Floats ride in the envelope as full-precision strings.
fn num(v: &Value) -> f64 {
    v.as_str().expect("stringified float").parse().expect("parses as f64")
}

#[test]
fn constants_envelope_matches_closed_form() {
    let v = run_json(&["constants", "--theorem", "sigma-v", "--beta", "1.7627471740", "--json"]);
    assert_eq!(v["command"], "constants");
    assert_eq!(v["outputs"]["theorem"], "sigma-v");
    assert_eq!(v["outputs"]["regime"], "spherical");
    // Truncated decimal input for 2 ln tan(3pi/8): C stays within 1e-9 of
    // pi / (2 sqrt 2).
    let c = num(&v["outputs"]["C"]);
    assert!((c - std::f64::consts::PI / 8.0f64.sqrt()).abs() < 1e-9);
    assert!(v["wall_ms"].as_f64().expect("wall_ms") >= 0.0);
}

#[test]
fn constants_human_table_has_header() {
    let (code, stdout, _) = run(&["constants", "--theorem", "sigma-n-v", "--beta", "4.0"]);
    assert_eq!(code, 0);
    let mut lines = stdout.lines();
    assert_eq!(lines.next(), Some("theorem  beta  regime  C  omega  b"));
    let row = lines.next().expect("data row");
    assert!(row.starts_with("sigma-n-v  4.0  flat-spherical  "), "row: {row}");
}

#[test]
fn solve_b0_residual_is_tiny() {
    let v = run_json(&["solve", "--equation", "b0", "--json"]);
    let root = num(&v["outputs"]["root"]);
    assert!((root.tan() - 2.0 * root).abs() < 1e-12);
    assert!(num(&v["outputs"]["residual"]) < 1e-12);
}

#[test]
fn solve_without_beta_is_usage_error() {
    let (code, _, stderr) = run(&["solve", "--equation", "omega-sigma-v"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("usage error"), "stderr: {stderr}");
}

#[test]
fn solve_unknown_equation_is_usage_error() {
    let (code, _, stderr) = run(&["solve", "--equation", "quintic"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown equation"), "stderr: {stderr}");
}

#[test]
fn unknown_theorem_is_usage_error() {
    let (code, _, _) = run(&["constants", "--theorem", "no-such-theorem", "--beta", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn sweep_writes_versioned_csv() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("rows.csv");
    let (code, _, _) = run(&[
        "sweep",
        "--theorem",
        "sigma-n-v",
        "--beta-min",
        "2.7",
        "--beta-max",
        "40",
        "--steps",
        "12",
        "--out",
        path.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).expect("csv written");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# klein-systolic sweep v1"));
    assert_eq!(lines.next(), Some("beta,regime,C,omega,b"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 12);
    // Above its threshold the non-vertical constant increases toward 2
    // and the cap angle stays pinned at pi/3.
    let cs: Vec<f64> = rows.iter().map(|r| r[2].parse().expect("C")).collect();
    assert!(cs.windows(2).all(|w| w[0] < w[1]), "C not increasing: {cs:?}");
    assert!(cs.iter().all(|c| *c < 2.0));
    for row in &rows {
        assert_eq!(row[1], "flat-spherical");
        let omega: f64 = row[3].parse().expect("omega");
        assert!((omega - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
    }
}

#[test]
fn extremal_then_systoles_round_trip() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("metric.json");
    let v = run_json(&[
        "extremal",
        "--theorem",
        "sigma-v",
        "--beta",
        "4.0",
        "--out",
        path.to_str().expect("utf-8 path"),
        "--json",
    ]);
    let b = num(&v["outputs"]["spec"]["b"]);
    let report = run_json(&[
        "systoles",
        "--metric",
        path.to_str().expect("utf-8 path"),
        "--grid",
        "96x96",
        "--json",
    ]);
    // A stored profile keeps its closed forms: the glide systole of the
    // flat-spherical extremal is pi and the vertical systole is 4b.
    let l_sigma = num(&report["outputs"]["l_sigma"]);
    let l_v = num(&report["outputs"]["l_v"]);
    assert!((l_sigma - std::f64::consts::PI).abs() < 1e-12);
    assert!((l_v - 4.0 * b).abs() < 1e-12);
    let volume = num(&report["outputs"]["volume"]);
    assert!(volume > 0.0);
}

#[test]
fn systoles_missing_file_is_runtime_error() {
    let (code, _, stderr) = run(&["systoles", "--metric", "/no/such/metric.json"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("error"), "stderr: {stderr}");
}

#[test]
fn verify_measure_emits_valid_certificate() {
    let v = run_json(&["verify-measure", "--theorem", "sigma-n-v", "--beta", "4.0", "--json"]);
    assert_eq!(v["outputs"]["valid"], Value::Bool(true));
    assert!(num(&v["outputs"]["eps_mass"]) < 1e-10);
    assert!(num(&v["outputs"]["eps_push"]) < 1e-3);
    // The certified constant agrees with the closed-form one.
    let published = run_json(&["constants", "--theorem", "sigma-n-v", "--beta", "4.0", "--json"]);
    let c_cert = num(&v["outputs"]["C"]);
    let c_pub = num(&published["outputs"]["C"]);
    assert!((c_cert - c_pub).abs() < 1e-9 * c_pub);
}

#[test]
fn verify_measure_spherical_regime_is_runtime_error() {
    // Below the threshold there is no measure construction to certify.
    let (code, _, stderr) = run(&["verify-measure", "--theorem", "sigma-v", "--beta", "1.0"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("error"), "stderr: {stderr}");
}

#[test]
fn verify_inequality_small_run_passes() {
    let v = run_json(&[
        "verify-inequality",
        "--theorem",
        "sigma-v",
        "--beta",
        "4.0",
        "--samples",
        "3",
        "--grid",
        "64x64",
        "--json",
    ]);
    assert_eq!(v["outputs"]["pass"], Value::Bool(true));
    assert_eq!(v["outputs"]["violations"], 0);
    assert_eq!(v["outputs"]["outcomes"].as_array().expect("outcomes").len(), 3);
    assert!(num(&v["outputs"]["worst_ratio"]) < 1.0);
}

#[test]
fn probe_asymptotics_passes() {
    let v = run_json(&["probe", "--asymptotics", "--json"]);
    assert_eq!(v["outputs"]["pass"], Value::Bool(true));
    assert_eq!(v["outputs"]["product_slope"]["sign"], -1);
    assert_eq!(
        v["outputs"]["sigma_n_v_limit"]["monotone_increasing"],
        Value::Bool(true)
    );
}

#[test]
fn probe_without_flag_is_usage_error() {
    let (code, _, _) = run(&["probe"]);
    assert_eq!(code, 2);
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abelbank")).args(args).output().unwrap()
}

fn run_on(command: &str, name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec![command, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_pr_exit_codes() {
    let ok = run_on("verify-pr", "lazy.json", &[]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["perfect_reconstruction"]["holds"], true);

    let bad = run_on("verify-pr", "haar_flipped.json", &[]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(json(&bad)["perfect_reconstruction"]["residual"].as_f64().unwrap() > 0.5);

    let malformed = run_on("verify-pr", "malformed.json", &[]);
    assert_eq!(malformed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&malformed.stderr).contains("error"));

    assert_eq!(run_on("verify-pr", "missing.json", &[]).status.code(), Some(2));
    assert_eq!(run(&["verify-pr"]).status.code(), Some(2));
}

#[test]
fn analyze_reports() {
    let out = run_on("analyze", "three_channel.json", &[]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["$schema"], "abelbank/report/v1");
    assert!((doc["frame"]["lower_bound"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((doc["frame"]["upper_bound"].as_f64().unwrap() - 2.0).abs() < 1e-12);

    let z = json(&run_on("analyze", "haar_z.json", &[]));
    assert_eq!(z["frame"]["method"], "torus-grid(64)");
    let z = json(&run_on("analyze", "haar_z.json", &["--grid", "16"]));
    assert_eq!(z["frame"]["method"], "torus-grid(16)");
}

#[test]
fn dual_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dual.json");
    let out = run_on("dual", "haar_analysis.json", &["--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let check = run(&["verify-pr", path.to_str().unwrap()]);
    assert_eq!(check.status.code(), Some(0));

    let fail = run_on("dual", "rank_deficient.json", &[]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(!fail.stderr.is_empty());
}

#[test]
fn apply_and_transversal_flag() {
    let signal = fixture("signal_z4.json");
    let out = run(&["apply", fixture("lazy.json").to_str().unwrap(), signal.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let input: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&signal).unwrap()).unwrap();
    assert_eq!(doc["output"]["samples"], input["samples"]);

    let neg = run_on("verify-pr", "haar.json", &["--transversal", "negative"]);
    assert_eq!(neg.status.code(), Some(0));
    assert_eq!(run_on("verify-pr", "haar.json", &["--transversal", "other"]).status.code(), Some(2));
}

#[test]
fn output_is_byte_stable() {
    let a = run_on("analyze", "haar.json", &[]);
    let b = run_on("analyze", "haar.json", &[]);
    assert_eq!(a.stdout, b.stdout);
}

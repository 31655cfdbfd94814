//! End-to-end runs of the `alleedyn` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use alleedyn::cli::output::parse_trajectory_csv;
use tempfile::TempDir;

const FIG1: &str = r#"{
  "params": {"m": 0.2, "theta": 0.5, "s1": 0.2, "s2": 0.3,
             "alpha1": 0.2, "alpha2": 0.1, "beta1": 0.15, "beta2": 0.12},
  "init": {"x": 0.9, "y1": 0.1, "y2": 0.1}
}
"#;

const FIG2: &str = r#"{
  "params": {"m": 0.02, "theta": 0.5, "s1": 0.08, "s2": 0.04,
             "alpha1": 0.2, "alpha2": 0.1, "beta1": 0.15, "beta2": 0.12},
  "init": {"x": 0.35, "y1": 0.1, "y2": 0.1}
}
"#;

fn config(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alleedyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_prey_only_meets_expectation() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fig1.json", FIG1);
    let out = dir.path().join("out");
    let o = run(&[
        "simulate",
        "--config",
        s(&cfg),
        "--expect",
        "1,0,0",
        "--tol",
        "1e-3",
        "--out",
        s(&out),
        "--format",
        "csv,svg",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(csv.starts_with("t,x,y1,y2\n"));
    let (times, states) = parse_trajectory_csv(&csv).unwrap();
    assert_eq!(times[0], 0.0);
    assert_eq!(states[0].x, 0.9);
    assert!(std::fs::read_to_string(out.join("trajectory.svg"))
        .unwrap()
        .contains("<polyline"));
}

#[test]
fn simulate_expectation_failure_exit_code() {
    // The run collapses to the origin, so this target is not reached.
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fig2.json", FIG2);
    let o = run(&[
        "simulate",
        "--config",
        s(&cfg),
        "--expect",
        "0.4,0,0.228",
        "--tol",
        "1e-3",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulate_without_init_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let text = FIG1.replace(",\n  \"init\": {\"x\": 0.9, \"y1\": 0.1, \"y2\": 0.1}", "");
    let cfg = config(&dir, "noinit.json", &text);
    assert_eq!(code(&run(&["simulate", "--config", s(&cfg)])), 2);
}

#[test]
fn csv_output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fig1.json", FIG1);
    let a = run(&["simulate", "--config", s(&cfg)]);
    let b = run(&["simulate", "--config", s(&cfg)]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analyze_reports_prey_only_verdict() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fig1.json", FIG1);
    let o = run(&["analyze", "--config", s(&cfg)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let e1 = &v["equilibria"][0];
    assert_eq!(e1["label"], "E1");
    assert_eq!(e1["stability"]["classification"], "StableNode");
    assert_eq!(v["equilibria"][2]["feasible"], false);
    // x4 = s1 / (alpha1 - theta s1) = 2 exceeds the carrying capacity, so y1 < 0.
    assert_eq!(v["equilibria"][3]["feasible"], false);
    assert!((v["equilibria"][3]["point"]["x"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let again = run(&["analyze", "--config", s(&cfg)]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad_m = config(&dir, "m.json", &FIG1.replace("\"m\": 0.2", "\"m\": 1.5"));
    let o = run(&["analyze", "--config", s(&bad_m)]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("`m`"), "{err}");
    let unknown = config(&dir, "u.json", &FIG1.replace("\"theta\"", "\"tehta\""));
    assert_eq!(code(&run(&["analyze", "--config", s(&unknown)])), 2);
    assert_eq!(
        code(&run(&["analyze", "--config", "/nonexistent/cfg.json"])),
        2
    );
    assert_eq!(code(&run(&["analyze"])), 2);
}

#[test]
fn scan_writes_grid_and_boundaries() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fig1.json", FIG1);
    let out = dir.path().join("scan");
    let o = run(&[
        "scan",
        "--config",
        s(&cfg),
        "--axis",
        "alpha2,0.2,0.4,21",
        "--equilibrium",
        "E1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let grid = std::fs::read_to_string(out.join("scan.csv")).unwrap();
    assert_eq!(grid.lines().count(), 22);
    assert!(grid.starts_with("alpha2,label\n0.2,StableNode\n"));
    let edges = std::fs::read_to_string(out.join("boundaries.csv")).unwrap();
    assert!(edges.lines().count() >= 2);
}

#[test]
fn scan_invalid_range_exit_code() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fig1.json", FIG1);
    let o = run(&["scan", "--config", s(&cfg), "--axis", "m,0.5,1.5,10"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn scan_respects_thread_cap() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "fig1.json", FIG1);
    let args = [
        "scan",
        "--config",
        s(&cfg),
        "--axis",
        "alpha2,0.1,0.5,40",
        "--axis",
        "s2,0.1,0.5,5",
        "--format",
        "json",
    ];
    let one = Command::new(env!("CARGO_BIN_EXE_alleedyn"))
        .env("ALLEEDYN_THREADS", "1")
        .args(args)
        .output()
        .unwrap();
    let many = run(&args);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
}

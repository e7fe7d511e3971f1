use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lienard::averaging::LienardSystem;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lienard"))
}

fn example_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/example4.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn lienard")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(text.lines().last().expect("diagnostic line")).expect("diagnostic is JSON")
}

#[test]
fn bound_for_degrees() {
    let o = run(&["bound", "--n", "4", "--m", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "4\n");
    let o = run(&["bound", "--n", "7", "--m", "3"]);
    assert_eq!(stdout(&o), "5\n");
}

#[test]
fn bound_from_config_reports_both_counts() {
    let o = run(&["bound", "--config", example_config().to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["descartes_bound"], 4);
    assert_eq!(v["predicted_cycle_count"], 4);
}

#[test]
fn design_reproduces_example_system() {
    let o = run(&["design", "--targets", "1,2,3,4", "--n", "4", "--m", "2", "--pin", "b2=1"]);
    assert!(o.status.success());
    let sys: LienardSystem = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(sys, LienardSystem::four_cycle_example(0.0));
}

#[test]
fn average_prints_exact_and_decimal() {
    let o = run(&["average", "--config", example_config().to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["coeffs"][5]["pi_inv"], "1/450");
    let lead = v["decimal"][5].as_f64().unwrap();
    assert!((lead - 1.0 / (450.0 * std::f64::consts::PI)).abs() < 1e-18);
}

#[test]
fn roots_lists_four_records() {
    let o = run(&["roots", "--config", example_config().to_str().unwrap()]);
    let v: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    let values: Vec<f64> = v.iter().map(|r| r["value"].as_f64().unwrap()).collect();
    assert_eq!(values.len(), 4);
    assert!(values.iter().zip(1..).all(|(v, k)| (v - k as f64).abs() < 1e-10));
}

#[test]
fn verify_example_matches_all_cycles() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "verify",
        "--config",
        example_config().to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["matches"].as_array().unwrap().len(), 4);
    assert_eq!(report["epsilon_used"], 0.01);
    for f in ["poincare.csv", "cycles.csv", "displacement.svg", "manifest.json", "trajectories/cycle_0.csv"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
}

#[test]
fn verify_with_tiny_match_tolerance_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "verify",
        "--config",
        example_config().to_str().unwrap(),
        "--match-tol",
        "1e-6",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "unmatched");
}

#[test]
fn verify_requires_epsilon() {
    let o = run(&["verify", "--targets", "1,2,3,4", "--n", "4", "--m", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "usage");
}

#[test]
fn verify_accepts_designed_system_and_flag_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "verify",
        "--targets",
        "1,2,3,4",
        "--n",
        "4",
        "--m",
        "2",
        "--epsilon",
        "0.005",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn simulate_writes_trajectory_csv() {
    let o = run(&[
        "simulate",
        "--config",
        example_config().to_str().unwrap(),
        "--seed",
        "2.5,0",
        "--t-end",
        "7",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,x,y"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((last[0] - 7.0).abs() < 1e-12);
    assert!((last[1].hypot(last[2]) - 2.5).abs() < 0.05);
}

#[test]
fn poincare_scan_csv() {
    let o = run(&["poincare", "--config", example_config().to_str().unwrap(), "--scan", "0.5:4.5:21"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("x0,P,D"));
    assert_eq!(text.lines().count(), 22);
}

#[test]
fn config_errors_are_diagnosed() {
    let dir = tempfile::tempdir().unwrap();
    let missing_g = dir.path().join("missing_g.json");
    std::fs::write(&missing_g, r#"{"n": 2, "m": 1, "f": [1, 0, 1]}"#).unwrap();
    let o = run(&["average", "--config", missing_g.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let diag = stderr_json(&o);
    assert_eq!(diag["error"], "config");
    assert_eq!(diag["key"], "g");

    let short_f = dir.path().join("short_f.json");
    std::fs::write(&short_f, r#"{"n": 3, "m": 1, "f": [1, 0, 1], "g": [1, 1]}"#).unwrap();
    let diag = stderr_json(&run(&["average", "--config", short_f.to_str().unwrap()]));
    assert_eq!((diag["expected"].as_u64(), diag["found"].as_u64()), (Some(4), Some(3)));

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"n\": 3,\n\"m\" 1}").unwrap();
    let diag = stderr_json(&run(&["average", "--config", broken.to_str().unwrap()]));
    assert_eq!(diag["line"], 2);
}

#[test]
fn computation_errors_exit_one() {
    // an a-pin of 1 forces b0 = 3π/8, outside the coefficient field
    let o = run(&["design", "--targets", "1,2", "--n", "2", "--m", "1", "--pin", "a2=1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "design");
    let o = run(&["design", "--targets", "1,2", "--n", "2", "--m", "1", "--pin", "a2=1/pi"]);
    assert!(o.status.success());
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(run(&["bound", "--n", "four", "--m", "2"]).status.code(), Some(2));
    assert_eq!(run(&["poincare", "--scan", "3:1:10"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert!(run(&["--help"]).status.success());
}

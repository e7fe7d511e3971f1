use std::fs;

use sha2::{Digest, Sha256};

use lienard::averaging::LienardSystem;
use lienard::pipeline::{emit_plot_data, run_verification, VerifyOptions};
use lienard::simulator::{IntegratorConfig, Stability};

fn report(eps: f64) -> lienard::pipeline::VerificationReport {
    run_verification(&LienardSystem::four_cycle_example(eps), &IntegratorConfig::default(), &VerifyOptions::default())
        .expect("verification")
}

#[test]
fn default_window_spans_the_averaged_roots() {
    let r = report(0.01);
    assert!((r.window.lo - 0.5).abs() < 1e-12);
    assert!((r.window.hi - 6.0).abs() < 1e-10);
    assert_eq!(r.scan.len() + r.sample_failures.len(), 200);
    assert!(r.fully_matched());
}

#[test]
fn cycles_csv_agrees_with_report() {
    let r = report(0.01);
    let dir = tempfile::tempdir().unwrap();
    emit_plot_data(&r, dir.path()).unwrap();
    let mut reader = csv::Reader::from_path(dir.path().join("cycles.csv")).unwrap();
    let rows: Vec<(f64, String)> = reader
        .records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].parse().unwrap(), rec[1].to_string())
        })
        .collect();
    assert_eq!(rows.len(), r.simulated_cycles.len());
    for ((radius, stability), c) in rows.iter().zip(&r.simulated_cycles) {
        assert_eq!(*radius, c.radius, "17 significant digits round-trip");
        let expected = if c.stability == Stability::Stable { "stable" } else { "unstable" };
        assert_eq!(stability, expected);
    }
}

#[test]
fn trajectories_close_up() {
    let r = report(0.01);
    let dir = tempfile::tempdir().unwrap();
    emit_plot_data(&r, dir.path()).unwrap();
    for (k, c) in r.simulated_cycles.iter().enumerate() {
        let text = fs::read_to_string(dir.path().join(format!("trajectories/cycle_{k}.csv"))).unwrap();
        let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert!((last[1] - c.radius).abs() < 1e-6 && last[2].abs() < 1e-9, "cycle {k}: {last:?}");
        assert!((last[0] - c.period).abs() < 1e-6);
    }
}

#[test]
fn manifest_checksums_cover_every_file() {
    let r = report(0.01);
    let dir = tempfile::tempdir().unwrap();
    let manifest = emit_plot_data(&r, dir.path()).unwrap();
    for entry in &manifest.files {
        let bytes = fs::read(dir.path().join(&entry.path)).unwrap();
        assert_eq!(bytes.len(), entry.bytes);
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(digest, entry.sha256);
    }
    let on_disk: lienard::pipeline::Manifest =
        serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(on_disk, manifest);
    assert!(manifest.files.iter().all(|e| e.path != "manifest.json"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    emit_plot_data(&report(0.01), a.path()).unwrap();
    emit_plot_data(&report(0.01), b.path()).unwrap();
    for f in ["poincare.csv", "cycles.csv", "displacement.svg", "manifest.json", "trajectories/cycle_2.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

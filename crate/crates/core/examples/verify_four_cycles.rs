//! Averaged roots against simulated cycles for shrinking epsilon, then plot
//! data for the first run.
//!
//! ```text
//! cargo run --release --example verify_four_cycles -- out/
//! ```

use std::path::PathBuf;

use lienard::averaging::LienardSystem;
use lienard::pipeline::{emit_plot_data, run_verification, VerifyOptions};
use lienard::simulator::IntegratorConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "lienard-out".into()).into();
    let cfg = IntegratorConfig::default();

    println!("{:>8} {:>8} {:>12}  stability", "epsilon", "matched", "max |dr|");
    for (k, eps) in [0.02, 0.01, 0.005, 0.0025].into_iter().enumerate() {
        let sys = LienardSystem::four_cycle_example(eps);
        let report = run_verification(&sys, &cfg, &VerifyOptions::default())?;
        let worst = report.matches.iter().map(|m| m.distance).fold(0.0, f64::max);
        let agree = report.matches.iter().all(|m| m.stability_agrees);
        println!(
            "{eps:>8} {:>4}/{:<3} {worst:>12.3e}  {}",
            report.matches.len(),
            report.averaged_roots.len(),
            if agree { "agrees" } else { "DISAGREES" }
        );
        if k == 1 {
            let manifest = emit_plot_data(&report, &out)?;
            for f in &manifest.files {
                eprintln!("wrote {} ({} bytes)", out.join(&f.path).display(), f.bytes);
            }
        }
    }
    Ok(())
}

//! Return-map displacement D(x) = P(x) - x across a window, and the limit
//! cycles it brackets.
//!
//! ```text
//! cargo run --release --example poincare_scan
//! cargo run --release --example poincare_scan -- 0.02
//! ```

use lienard::averaging::LienardSystem;
use lienard::simulator::{find_limit_cycles, IntegratorConfig, ScanWindow};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let eps: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.01);
    let sys = LienardSystem::four_cycle_example(eps);
    let cfg = IntegratorConfig::default();
    let window = ScanWindow { lo: 0.5, hi: 4.5, count: 41 };

    let scan = find_limit_cycles(&sys, &cfg, &window)?;
    println!("epsilon = {eps}, {} section hits certified", scan.section_hits.len());
    println!("{:>8} {:>22} {:>12}", "x0", "P(x0)", "D");
    for s in &scan.samples {
        match &s.outcome {
            Ok(r) => println!("{:>8.3} {:>22.16} {:>12.3e}", s.x0, r.image, r.displacement()),
            Err(e) => println!("{:>8.3} failed: {e}", s.x0),
        }
    }

    println!("\n{:>20} {:>10} {:>12} {:>12}", "radius", "stability", "period", "multiplier");
    for c in &scan.cycles {
        let mult = c.multiplier.map_or("-".to_string(), |m| format!("{m:.6}"));
        println!("{:>20.14} {:>10?} {:>12.8} {:>12}", c.radius, c.stability, c.period, mult);
    }
    Ok(())
}

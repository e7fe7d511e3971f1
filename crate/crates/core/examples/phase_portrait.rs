//! Trajectories from a few seeds, written as CSV files, and a plain SVG
//! phase portrait.
//!
//! ```text
//! cargo run --release --example phase_portrait -- portrait/
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use lienard::averaging::LienardSystem;
use lienard::pipeline::trajectory_csv;
use lienard::simulator::{simulate, IntegratorConfig, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "portrait".into()).into();
    fs::create_dir_all(&dir)?;
    let sys = LienardSystem::four_cycle_example(0.05);
    let cfg = IntegratorConfig::default();

    // starts just off the unstable cycles, so orbits drift to the stable ones
    let seeds = [0.9, 1.1, 2.9, 3.1, 4.3];
    let scale = 60.0;
    let mut svg = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" viewBox=\"-300 -300 600 600\">\n",
    );
    for (i, x0) in seeds.into_iter().enumerate() {
        let path = simulate(State::new(x0, 0.0, 0.0), 300.0, &sys, &cfg)?;
        let last = path.last().unwrap();
        println!("seed x0 = {x0}: {} states, final radius {:.4}", path.len(), last.x.hypot(last.y));
        fs::write(dir.join(format!("seed_{i}.csv")), trajectory_csv(&path)?)?;

        let mut points = String::new();
        for s in &path {
            write!(points, "{:.2},{:.2} ", s.x * scale, -s.y * scale)?;
        }
        writeln!(svg, "<polyline fill=\"none\" stroke=\"hsl({} 70% 40%)\" stroke-width=\"0.6\" points=\"{}\"/>", i * 70, points.trim_end())?;
    }
    svg.push_str("<line x1=\"-300\" y1=\"0\" x2=\"300\" y2=\"0\" stroke=\"gray\"/>\n</svg>\n");
    fs::write(dir.join("portrait.svg"), svg)?;
    println!("wrote {}", dir.display());
    Ok(())
}

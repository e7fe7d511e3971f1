//! Descartes bound, the cycle-count bound for the degrees, and certified
//! positive roots of the averaged function.
//!
//! ```text
//! cargo run --example roots_and_bound
//! cargo run --example roots_and_bound -- path/to/config.json
//! ```

use lienard::averaging::{
    averaged_function, descartes_bound, positive_roots, predicted_cycle_count, LienardSystem, RootOptions,
};
use lienard::cli::parse_config;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = match std::env::args().nth(1) {
        Some(path) => parse_config(path.as_ref())?.system().ok_or("config has no f/g")?,
        None => LienardSystem::four_cycle_example(0.0),
    };
    let avg = averaged_function(&sys)?;
    println!("n = {}, m = {}", sys.n, sys.m);
    println!("F0(r) = {}", avg.render());
    println!("sign variations (Descartes bound): {}", descartes_bound(&avg)?);
    println!("bound for degrees ({}, {}):         {}", sys.n, sys.m, predicted_cycle_count(sys.n, sys.m)?);

    let roots = positive_roots(&avg, &RootOptions::default())?;
    println!("\n{:>22} {:>46} {:>7} {:>5}", "root", "enclosure", "simple", "F0'");
    for r in &roots {
        println!(
            "{:>22.16} [{:.16}, {:.16}] {:>7} {:>5}",
            r.value, r.enclosure.0, r.enclosure.1, r.simple, if r.degree_sign > 0 { "+" } else { "-" }
        );
    }
    // F0' > 0 at a root gives a stable cycle for small positive epsilon
    let stable: Vec<f64> = roots.iter().filter(|r| r.degree_sign > 0).map(|r| r.value).collect();
    println!("\nstable for small epsilon > 0: {stable:?}");
    Ok(())
}

//! Solve for a system whose averaged function vanishes at chosen radii.
//!
//! ```text
//! cargo run --example design_four_cycles
//! cargo run --example design_four_cycles -- 1/2 1 3/2 2
//! ```

use lienard::averaging::{averaged_function, positive_roots, RootOptions};
use lienard::design::{design_cycles, residual_roots, CoeffId, DesignProblem};
use lienard::exactnum::{PiExt, Rational};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut targets: Vec<Rational> = std::env::args().skip(1).map(|s| s.parse()).collect::<Result<_, _>>()?;
    if targets.is_empty() {
        targets = (1..=4).map(Rational::integer).collect();
    }

    // n = 4, m = 2 has exactly four even unknowns besides the pin b2 = 1
    let problem = DesignProblem::new(4, 2, targets.clone()).with_pin(CoeffId::G(2), PiExt::from(1));
    let sys = design_cycles(&problem)?;
    for (i, a) in sys.f.iter().enumerate() {
        println!("a{i} = {a}");
    }
    for (j, b) in sys.g.iter().enumerate() {
        println!("b{j} = {b}");
    }

    let avg = averaged_function(&sys)?;
    println!("\nF0(r) = {}", avg.render());
    for t in &targets {
        println!("F0({t}) = {}", avg.eval_exact(t));
    }
    let found: Vec<f64> = positive_roots(&avg, &RootOptions::default())?.iter().map(|r| r.value).collect();
    println!("positive roots: {found:?}");

    let residual = residual_roots(&sys, &targets)?;
    println!("\nleftover factor: {:?}", residual.quotient);
    if let Some(root) = residual.linear_root {
        println!("leftover root {root} (magnitude {})", residual.magnitude_product);
    }
    println!("extra positive roots: {:?}", residual.positive_residuals);

    println!("\n{}", serde_json::to_string_pretty(&sys)?);
    Ok(())
}

//! Averaged function of the four-cycle system, exact and by quadrature.
//!
//! ```text
//! cargo run --example averaged_function
//! ```

use lienard::averaging::{averaged_function, averaged_quadrature, wallis_alpha, wallis_quadrature, LienardSystem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = LienardSystem::four_cycle_example(0.0);
    println!("f = {:?}", sys.f);
    println!("g = {:?}", sys.g);

    let avg = averaged_function(&sys)?;
    println!("\nF0(r) = {}", avg.render());
    println!("decimal coefficients: {:?}", avg.decimal());

    println!("\n{:>5} {:>24} {:>24} {:>10}", "r", "exact", "quadrature", "diff");
    for r in [0.25, 0.5, 1.0, 1.5, 2.5, 3.0, 3.5, 4.0, 4.5] {
        let exact = avg.eval(r);
        let quad = averaged_quadrature(&sys, r);
        println!("{r:>5} {exact:>24.16e} {quad:>24.16e} {:>10.1e}", (exact - quad).abs());
    }

    // the coefficients of the odd-power block
    println!("\n{:>3} {:>12} {:>20} {:>20}", "k", "alpha_k", "alpha_k", "quadrature");
    for k in 0..8 {
        let a = wallis_alpha(k);
        println!("{k:>3} {:>12} {:>20.16} {:>20.16}", a.to_string(), a.to_f64(), wallis_quadrature(k));
    }
    Ok(())
}

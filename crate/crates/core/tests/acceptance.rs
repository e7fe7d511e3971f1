//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lienard::averaging::{
    averaged_function, averaged_quadrature, descartes_bound, positive_roots, predicted_cycle_count,
    wallis_alpha, wallis_quadrature, LienardSystem, RootOptions,
};
use lienard::design::{design_cycles, CoeffId, DesignProblem};
use lienard::exactnum::{PiExt, Rational};
use lienard::simulator::{find_limit_cycles, CycleScan, IntegratorConfig, ScanWindow, Stability, State};

const ORACLE_TOL: f64 = 1e-9;
const WALLIS_TOL: f64 = 1e-10;
const ROOT_TOL: f64 = 1e-10;
const CYCLE_TOL: f64 = 0.1;
const IDENTITY_FACTOR: f64 = 10.0;
const ROUND_TRIP_TOL: f64 = 1e-12;
const SEED: u64 = 0x11e7a2d;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn over_pi(p: i64, q: i64) -> PiExt {
    PiExt::over_pi(Rational::frac(p, q))
}

/// Coefficients of the closed form printed for the four-cycle case,
/// `(r(3π(8a0 + 2a2 r² + a4 r⁴) + 32 b2 r) + 96 b0) / (48π)`, expanded
/// term by term.
fn displayed_averaged_function(sys: &LienardSystem) -> Vec<PiExt> {
    let over_48pi = |v: PiExt| v.scale(&Rational::frac(1, 48)).try_div_pi().expect("rational numerator");
    let three_pi = |v: &PiExt, k: i64| v.scale(&Rational::integer(3 * k)).try_mul_pi().expect("a_i in Q/pi");
    let mut c = vec![PiExt::zero(); 6];
    c[0] = over_48pi(sys.g[0].scale(&Rational::integer(96)));
    c[1] = over_48pi(three_pi(&sys.f[0], 8));
    c[2] = over_48pi(sys.g[2].scale(&Rational::integer(32)));
    c[3] = over_48pi(three_pi(&sys.f[2], 2));
    c[5] = over_48pi(three_pi(&sys.f[4], 1));
    c
}

fn criterion_1() -> Outcome {
    let sys = LienardSystem::four_cycle_example(0.0);
    let avg = averaged_function(&sys).expect("averaged function");
    let expected = displayed_averaged_function(&sys);
    let mut coeffs = avg.coeffs.clone();
    coeffs.resize(expected.len(), PiExt::zero());
    let residual: Vec<PiExt> = coeffs.iter().zip(&expected).map(|(a, b)| a - b).collect();
    let nonzero = residual.iter().filter(|r| !r.is_zero()).count();
    outcome(
        nonzero == 0 && avg.coeffs.len() <= expected.len(),
        format!("{nonzero} nonzero residual coefficients; F0 = {}", avg.render()),
    )
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::frac(rng.gen_range(-1000..=1000), 100)
}

/// Coefficients in [-10, 10]; every slot except the even `b` gets a random
/// `1/π` part as well, so both parts of the field are exercised.
fn random_system(rng: &mut ChaCha8Rng) -> LienardSystem {
    let n = rng.gen_range(1..=8);
    let m = rng.gen_range(1..=8);
    let coeff = |rng: &mut ChaCha8Rng, allow_pi: bool| loop {
        let rat = random_rational(rng);
        let pi_inv = if allow_pi && rng.gen_bool(0.5) { random_rational(rng) } else { Rational::zero() };
        let v = PiExt::new(rat, pi_inv);
        if !v.is_zero() {
            return v;
        }
    };
    let f = (0..=n).map(|_| coeff(rng, true)).collect();
    let g = (0..=m).map(|j| coeff(rng, j % 2 == 1)).collect();
    LienardSystem::with_degrees(n, m, f, g, 0.0).expect("valid random system")
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let mut worst_scaled = 0.0f64;
    let mut failures = 0;
    for _ in 0..50 {
        let sys = random_system(&mut rng);
        let avg = averaged_function(&sys).expect("averaged function");
        for _ in 0..10 {
            let r: f64 = rng.gen_range(0.1..5.0);
            let exact = avg.eval_exact(&Rational::from_f64(r).unwrap()).to_f64();
            let quad = averaged_quadrature(&sys, r);
            let scale: f64 = avg.decimal().iter().enumerate().map(|(k, c)| c.abs() * r.powi(k as i32)).sum();
            let diff = (exact - quad).abs();
            worst = worst.max(diff);
            worst_scaled = worst_scaled.max(diff / scale.max(1.0));
            if diff > ORACLE_TOL {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("500 evaluations, {failures} over tolerance; max |d| = {worst:.2e}, max |d|/max(1, S) = {worst_scaled:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let anchors = wallis_alpha(0) == Rational::one()
        && wallis_alpha(1) == Rational::frac(1, 4)
        && wallis_alpha(2) == Rational::frac(1, 8);
    let worst = (0..=10).map(|k| (wallis_alpha(k).to_f64() - wallis_quadrature(k)).abs()).fold(0.0, f64::max);
    outcome(anchors && worst <= WALLIS_TOL, format!("anchors exact: {anchors}; max |d| = {worst:.2e}"))
}

fn four_cycle_design() -> LienardSystem {
    let targets = (1..=4).map(Rational::integer).collect();
    let problem = DesignProblem::new(4, 2, targets)
        .with_pin(CoeffId::G(2), PiExt::from(1))
        .zero(CoeffId::F(1))
        .zero(CoeffId::F(3))
        .zero(CoeffId::G(1));
    design_cycles(&problem).expect("four-cycle design")
}

fn criterion_4() -> Outcome {
    let sys = four_cycle_design();
    let checks = [
        (sys.f[0] == over_pi(-476, 225), "a0"),
        (sys.f[2] == over_pi(-52, 45), "a2"),
        (sys.f[4] == over_pi(8, 225), "a4"),
        (sys.g[0] == PiExt::rational(Rational::frac(4, 15)), "b0"),
        (sys.f[1].is_zero() && sys.f[3].is_zero() && sys.g[1].is_zero(), "zeros"),
        (sys.g[2] == PiExt::from(1), "b2"),
    ];
    let bad: Vec<&str> = checks.iter().filter(|(ok, _)| !ok).map(|(_, name)| *name).collect();
    outcome(bad.is_empty(), format!("a0 = {}, a2 = {}, a4 = {}, b0 = {}; mismatched: {bad:?}", sys.f[0], sys.f[2], sys.f[4], sys.g[0]))
}

fn criterion_5() -> Outcome {
    let sys = four_cycle_design();
    let avg = averaged_function(&sys).expect("averaged function");
    let roots = positive_roots(&avg, &RootOptions::default()).expect("roots");
    let values: Vec<f64> = roots.iter().map(|r| r.value).collect();
    let signs: Vec<i32> = roots.iter().map(|r| r.degree_sign).collect();
    let close = roots.len() == 4 && roots.iter().zip(1..=4).all(|(r, k)| (r.value - k as f64).abs() <= ROOT_TOL);
    let bound = descartes_bound(&avg).expect("bound");
    let predicted = predicted_cycle_count(4, 2).expect("count");
    outcome(
        close && signs == [-1, 1, -1, 1] && bound == 4 && predicted == 4,
        format!("roots {values:?}, degree signs {signs:?}, Descartes bound {bound}, predicted {predicted}"),
    )
}

fn scan(eps: f64, window: ScanWindow) -> CycleScan {
    let sys = LienardSystem::four_cycle_example(eps);
    find_limit_cycles(&sys, &IntegratorConfig::default(), &window).expect("scan")
}

fn max_deviation(scan: &CycleScan) -> f64 {
    scan.cycles.iter().zip(1..).map(|(c, k)| (c.radius - k as f64).abs()).fold(0.0, f64::max)
}

fn reproduces_four_cycles(scan: &CycleScan) -> bool {
    use Stability::*;
    let pattern: Vec<Stability> = scan.cycles.iter().map(|c| c.stability).collect();
    scan.cycles.len() == 4 && max_deviation(scan) <= CYCLE_TOL && pattern == [Unstable, Stable, Unstable, Stable]
}

const FOUR_CYCLE_WINDOW: ScanWindow = ScanWindow { lo: 0.5, hi: 4.5, count: 200 };

fn criterion_6(scans: &mut Vec<(f64, CycleScan)>) -> Outcome {
    let s = scan(0.01, FOUR_CYCLE_WINDOW);
    let radii: Vec<String> = s.cycles.iter().map(|c| format!("{:.6} {:?}", c.radius, c.stability)).collect();
    let pass = reproduces_four_cycles(&s);
    let detail = format!("{} cycles: {}; max |x* - k| = {:.3e}", s.cycles.len(), radii.join(", "), max_deviation(&s));
    scans.push((0.01, s));
    outcome(pass, detail)
}

fn criterion_7(scans: &mut Vec<(f64, CycleScan)>) -> Outcome {
    for eps in [0.005, 0.0025] {
        scans.push((eps, scan(eps, FOUR_CYCLE_WINDOW)));
    }
    let devs: Vec<f64> = scans.iter().map(|(_, s)| max_deviation(s)).collect();
    let shown: Vec<String> = devs.iter().map(|d| format!("{d:.3e}")).collect();
    let all_four = scans.iter().all(|(_, s)| reproduces_four_cycles(s));
    let decreasing = devs.windows(2).all(|w| w[1] < w[0]);
    outcome(
        all_four && decreasing,
        format!("max |x* - k| for eps = 1/100, 1/200, 1/400: {}", shown.join(", ")),
    )
}

fn criterion_8(scans: &mut Vec<(f64, CycleScan)>) -> Outcome {
    let cfg = IntegratorConfig::default();
    let s = scan(0.0, ScanWindow { lo: 0.5, hi: 5.0, count: 20 });
    let mut worst = 0.0f64;
    let mut ok = s.samples.len() == 20;
    for sample in &s.samples {
        match &sample.outcome {
            Ok(r) => {
                let ratio = r.displacement().abs() / (IDENTITY_FACTOR * cfg.rtol * sample.x0);
                worst = worst.max(ratio);
                ok &= ratio <= 1.0;
            }
            Err(_) => ok = false,
        }
    }
    scans.push((0.0, s));
    outcome(ok, format!("max |P(x) - x| / (10 rtol x) = {worst:.3e} over 20 points"))
}

fn criterion_9(scans: &[(f64, CycleScan)]) -> Outcome {
    let mut hits = 0;
    let mut violations = Vec::<(f64, State)>::new();
    for (eps, s) in scans {
        let sys = LienardSystem::four_cycle_example(*eps);
        let g: Vec<f64> = sys.g.iter().map(PiExt::to_f64).collect();
        for hit in &s.section_hits {
            hits += 1;
            let gx = g.iter().rev().fold(0.0, |acc, c| acc * hit.x + c);
            if hit.x * hit.x - eps * eps * gx * gx <= 0.0 {
                violations.push((*eps, *hit));
            }
        }
    }
    for (eps, v) in &violations {
        println!("  violation at eps = {eps}: x = {}", v.x);
    }
    outcome(
        violations.is_empty() && hits > 0,
        format!("{hits} section hits checked, {} violations", violations.len()),
    )
}

fn random_targets(rng: &mut ChaCha8Rng, count: usize) -> Vec<Rational> {
    loop {
        let mut t: Vec<Rational> = (0..count)
            .map(|_| Rational::frac(rng.gen_range(1..=60), rng.gen_range(1..=8)))
            .collect();
        t.sort();
        t.dedup();
        if t.len() == count {
            return t;
        }
    }
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0xd5);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for trial in 0..25 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=6);
        let count = predicted_cycle_count(n, m).expect("count");
        let targets = random_targets(&mut rng, count);
        let result = design_cycles(&DesignProblem::new(n, m, targets.clone())).map_err(|e| e.to_string()).and_then(|sys| {
            let avg = averaged_function(&sys).map_err(|e| e.to_string())?;
            positive_roots(&avg, &RootOptions::default()).map_err(|e| e.to_string())
        });
        match result {
            Ok(roots) if roots.len() == count => {
                let dev = roots.iter().zip(&targets).map(|(r, t)| (r.value - t.to_f64()).abs()).fold(0.0, f64::max);
                worst = worst.max(dev);
                if dev > ROUND_TRIP_TOL {
                    failures.push(format!("trial {trial}: deviation {dev:.2e}"));
                }
            }
            Ok(roots) => failures.push(format!("trial {trial}: {} roots, expected {count}", roots.len())),
            Err(e) => failures.push(format!("trial {trial} (n = {n}, m = {m}): {e}")),
        }
    }
    for f in &failures {
        println!("  {f}");
    }
    outcome(failures.is_empty(), format!("25 designs, max |root - target| = {worst:.2e}"))
}

fn main() -> ExitCode {
    let mut scans = Vec::new();
    let mut all_pass = true;
    let mut report = |k: usize, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let o = run();
        all_pass &= o.pass;
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {k:>2}: {status} ({:.2}s) {}", start.elapsed().as_secs_f64(), o.detail);
    };
    report(1, &mut criterion_1);
    report(2, &mut criterion_2);
    report(3, &mut criterion_3);
    report(4, &mut criterion_4);
    report(5, &mut criterion_5);
    report(6, &mut || criterion_6(&mut scans));
    report(7, &mut || criterion_7(&mut scans));
    report(8, &mut || criterion_8(&mut scans));
    report(9, &mut || criterion_9(&scans));
    report(10, &mut criterion_10);
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Numerical quadrature of the averaging integral, kept independent of the
//! closed form so it can serve as its oracle.

use std::f64::consts::PI;

use super::LienardSystem;

const GL_POINTS: usize = 20;
const PANELS: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(npts: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; npts];
    let mut weights = vec![0.0; npts];
    let n = npts as f64;
    for i in 0..npts.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=npts {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[npts - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[npts - 1 - i] = w;
    }
    (nodes, weights)
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Composite Gauss-Legendre rule over `panels` equal pieces of `[a, b]`.
pub fn integrate_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(GL_POINTS);
    let h = (b - a) / panels as f64;
    let mut acc = CompensatedSum::default();
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        for (x, w) in nodes.iter().zip(&weights) {
            acc.add(0.5 * h * w * f(mid + 0.5 * h * x));
        }
    }
    acc.value()
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Horner's scheme with error-free transformations; accurate as if computed
/// in twice the working precision.
fn compensated_horner(coeffs: &[f64], x: f64) -> f64 {
    let mut s = 0.0;
    let mut err = 0.0;
    for &c in coeffs.iter().rev() {
        let (p, pe) = two_prod(s, x);
        let (t, se) = two_sum(p, c);
        s = t;
        err = err * x + (pe + se);
    }
    s + err
}

/// `F0(r)` by direct quadrature of
/// `(1/2π) ∫₀^{2π} f(r cosθ) r sin²θ + sgn(sinθ) sinθ g(r cosθ) dθ`,
/// split at θ = π where the sign function jumps.
pub fn averaged_quadrature(sys: &LienardSystem, r: f64) -> f64 {
    let f: Vec<f64> = sys.f.iter().map(|c| c.to_f64()).collect();
    let g: Vec<f64> = sys.g.iter().map(|c| c.to_f64()).collect();
    let integrand = |theta: f64, sgn: f64| {
        let (s, c) = theta.sin_cos();
        let x = r * c;
        compensated_horner(&f, x) * r * s * s + sgn * s * compensated_horner(&g, x)
    };
    let upper = integrate_composite(|t| integrand(t, 1.0), 0.0, PI, PANELS);
    let lower = integrate_composite(|t| integrand(t, -1.0), PI, 2.0 * PI, PANELS);
    (upper + lower) / (2.0 * PI)
}

/// `(1/π) ∫₀^{2π} cos^{2k}θ sin²θ dθ`, numerically.
pub fn wallis_quadrature(k: u32) -> f64 {
    let integral = integrate_composite(
        |t| {
            let (s, c) = t.sin_cos();
            c.powi(2 * k as i32) * s * s
        },
        0.0,
        2.0 * PI,
        2 * PANELS,
    );
    integral / PI
}

//! Dormand-Prince 5(4) embedded pair for autonomous planar systems.

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// 5th-order weights (also the last stage row).
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// Differences between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub type Vec2 = [f64; 2];

fn axpy(base: Vec2, terms: &[(f64, Vec2)], h: f64) -> Vec2 {
    let mut out = base;
    for (a, k) in terms {
        out[0] += h * a * k[0];
        out[1] += h * a * k[1];
    }
    out
}

/// One step of size `h` from `u`. Returns the 5th-order solution and the
/// embedded error estimate.
pub fn step<F: Fn(Vec2) -> Vec2>(rhs: &F, u: Vec2, h: f64) -> (Vec2, Vec2) {
    let k1 = rhs(u);
    let k2 = rhs(axpy(u, &[(A21, k1)], h));
    let k3 = rhs(axpy(u, &[(A31, k1), (A32, k2)], h));
    let k4 = rhs(axpy(u, &[(A41, k1), (A42, k2), (A43, k3)], h));
    let k5 = rhs(axpy(u, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], h));
    let k6 = rhs(axpy(u, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], h));
    let next = axpy(u, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)], h);
    let k7 = rhs(next);
    let err = axpy(
        [0.0, 0.0],
        &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)],
        h,
    );
    (next, err)
}

/// RMS of the error scaled by `atol + rtol·max(|u|, |next|)`.
pub fn error_norm(u: Vec2, next: Vec2, err: Vec2, rtol: f64, atol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let scale = atol + rtol * u[i].abs().max(next[i].abs());
        acc += (err[i] / scale).powi(2);
    }
    (acc / 2.0).sqrt()
}

/// Step-size factor after a step with the given error norm.
pub fn step_factor(err: f64) -> f64 {
    if err == 0.0 {
        return 5.0;
    }
    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
}

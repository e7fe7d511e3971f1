//! Positive real roots of the averaged function.
//!
//! A geometric sign-scan grid is laid over `(0, r_max]`; each cell is then
//! checked with Descartes' rule on the interval (via the Möbius map onto
//! `(0, ∞)`) and split until every cell holds zero or one root. Isolated
//! roots are refined by bisection with exact sign evaluation at binary64
//! points, so no rounding can flip a sign.

use serde::{Deserialize, Serialize};

use super::{AveragedFunction, AveragingError};
use crate::exactnum::Rational;
use crate::poly::{self, ScaledPoly};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub value: f64,
    pub enclosure: (f64, f64),
    pub simple: bool,
    /// Sign of `F0'` at the root: the Brouwer degree of `F0` near it.
    pub degree_sign: i32,
}

#[derive(Debug, Clone)]
pub struct RootOptions {
    /// Upper end of the search window; `None` uses [`default_r_max`].
    pub r_max: Option<f64>,
    pub tol: f64,
    /// Scan points per unit of polynomial degree plus one.
    pub grid_density: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { r_max: None, tol: 1e-13, grid_density: 10 }
    }
}

/// `1 + 2·(1 + max |c_i / c_d|)`, which contains every root.
pub fn default_r_max(p: &AveragedFunction) -> f64 {
    let c = p.decimal();
    let Some(d) = p.degree() else {
        return 1.0;
    };
    let lead = c[d].abs();
    let ratio = c[..d].iter().map(|x| x.abs() / lead).fold(0.0, f64::max);
    1.0 + 2.0 * (1.0 + ratio)
}

fn exact(x: f64) -> Rational {
    Rational::from_f64(x).expect("finite grid point")
}

struct Isolator {
    poly: ScaledPoly,
    tol: f64,
}

impl Isolator {
    fn sign(&self, x: f64) -> i32 {
        self.poly.sign_at(&exact(x))
    }

    fn variations(&self, a: f64, b: f64) -> usize {
        self.poly.interval_variations(&exact(a), &exact(b))
    }

    /// Interior split point of `(a, b)` that is not itself a root.
    fn split_point(&self, a: f64, b: f64) -> Option<f64> {
        [0.5, 0.4375, 0.5625, 0.375, 0.625]
            .into_iter()
            .map(|t| a + t * (b - a))
            .find(|&x| x > a && x < b && self.sign(x) != 0)
    }

    /// Collects cells `(a, b)` containing exactly one root.
    fn isolate(&self, a: f64, b: f64, out: &mut Vec<(f64, f64)>) -> Result<(), AveragingError> {
        match self.variations(a, b) {
            0 => Ok(()),
            1 => {
                out.push((a, b));
                Ok(())
            }
            _ => {
                if b - a <= self.tol {
                    return Err(AveragingError::PossibleMultipleRoot { lo: a, hi: b });
                }
                match self.split_point(a, b) {
                    Some(mid) => {
                        self.isolate(a, mid, out)?;
                        self.isolate(mid, b, out)
                    }
                    None => Err(AveragingError::PossibleMultipleRoot { lo: a, hi: b }),
                }
            }
        }
    }

    /// Shrinks a cell holding one simple root down to width `<= width`.
    /// Returns the enclosure and, if hit exactly, the root itself.
    fn bisect(&self, mut lo: f64, mut hi: f64, width: f64) -> (f64, f64, Option<f64>) {
        let s_lo = self.sign(lo);
        while hi - lo > width {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            let s = self.sign(mid);
            if s == 0 {
                let half = 0.25 * width;
                return ((mid - half).max(lo), (mid + half).min(hi), Some(mid));
            }
            if s == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi, None)
    }
}

/// Positive roots of `p` in `(0, r_max]`, sorted ascending.
pub fn positive_roots(
    p: &AveragedFunction,
    opts: &RootOptions,
) -> Result<Vec<RootRecord>, AveragingError> {
    if p.is_zero() {
        return Err(AveragingError::ZeroPolynomial);
    }
    if !(opts.tol > 0.0) {
        return Err(AveragingError::InvalidArgument(format!("tol must be positive (got {})", opts.tol)));
    }
    let r_max = opts.r_max.unwrap_or_else(|| default_r_max(p));
    if !(r_max > 0.0) || !r_max.is_finite() {
        return Err(AveragingError::InvalidArgument(format!("r_max must be positive (got {r_max})")));
    }

    // r^k factors only contribute the root 0.
    let trimmed = poly::trim(&p.coeffs);
    let low = trimmed.iter().position(|c| !c.is_zero()).expect("nonzero polynomial");
    let work = &trimmed[low..];
    let degree = work.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    let bound = poly::sign_variations(work);

    // No positive root lies below |c0| / (|c0| + max |ck|).
    let numeric = poly::to_f64(work);
    let c0 = numeric[0].abs();
    let cmax = numeric[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let r_min = (0.5 * c0 / (c0 + cmax)).max(f64::MIN_POSITIVE);
    if r_min >= r_max {
        return Ok(Vec::new());
    }

    let iso = Isolator { poly: ScaledPoly::new(work), tol: opts.tol };
    let count = (opts.grid_density.max(1) * (degree + 1)).max(2);
    let ratio = (r_max / r_min).ln();
    let mut grid: Vec<f64> = (0..count)
        .map(|i| {
            if i + 1 == count {
                r_max
            } else {
                r_min * (ratio * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect();
    // Keep grid points off exact roots so every root sits inside a cell.
    let last = grid.len() - 1;
    for (i, x) in grid.iter_mut().enumerate() {
        let factor = if i == last { 1.0 + 2f64.powi(-30) } else { 1.0 - 2f64.powi(-30) };
        while iso.sign(*x) == 0 {
            *x *= factor;
        }
    }

    let mut cells = Vec::new();
    for w in grid.windows(2) {
        iso.isolate(w[0], w[1], &mut cells)?;
    }
    if cells.len() > bound {
        return Err(AveragingError::TooManyBrackets { found: cells.len(), bound });
    }

    let dwork = ScaledPoly::new(&poly::derivative(work));
    let dfull = ScaledPoly::new(&p.derivative());
    let mut roots = Vec::with_capacity(cells.len());
    for (a, b) in cells {
        let (mut lo, mut hi, hit) = iso.bisect(a, b, opts.tol);
        let certified = |lo: f64, hi: f64| {
            let (l, h) = (exact(lo), exact(hi));
            let sl = dwork.sign_at(&l);
            sl != 0 && sl == dwork.sign_at(&h) && dwork.interval_variations(&l, &h) == 0
        };
        let mut simple = certified(lo, hi);
        if !simple && hit.is_none() {
            // Tighten past the requested tolerance before giving up.
            let (l2, h2, _) = iso.bisect(lo, hi, 0.0);
            lo = l2;
            hi = h2;
            simple = certified(lo, hi);
        }
        let value = hit.unwrap_or(lo + 0.5 * (hi - lo));
        let mut degree_sign = dfull.sign_at(&exact(value));
        if degree_sign == 0 {
            degree_sign = iso.sign(hi);
        }
        roots.push(RootRecord { value, enclosure: (lo, hi), simple, degree_sign });
    }
    Ok(roots)
}

//! First-order averaged function of the discontinuous Liénard system
//!
//! ```text
//! x' = y,   y' = -x - ε (f(x) y + sgn(y) g(x))
//! ```
//!
//! In polar coordinates the averaged radial drift is the polynomial
//!
//! ```text
//! F0(r) = Σ_i (α_i / 2) a_{2i} r^{2i+1} + Σ_j 2 b_{2j} r^{2j} / ((2j+1) π)
//! ```
//!
//! with Wallis constants `α_k = C(2k, k) / (4^k (k+1))`. Odd-indexed
//! coefficients of `f` and `g` never contribute.

mod quadrature;
mod roots;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactnum::{ExactError, PiExt, Rational};
use crate::poly;

pub use quadrature::{averaged_quadrature, gauss_legendre, integrate_composite, wallis_quadrature};
pub use roots::{positive_roots, default_r_max, RootOptions, RootRecord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AveragingError {
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("coefficient b{index} = {value} carries a 1/pi part; b/pi would leave the p + q/pi field")]
    OutsideField { index: usize, value: String },
    #[error("averaged function is identically zero")]
    ZeroPolynomial,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("found {found} sign-change brackets but the Descartes bound is {bound}")]
    TooManyBrackets { found: usize, bound: usize },
    #[error("possible multiple root in [{lo}, {hi}]")]
    PossibleMultipleRoot { lo: f64, hi: f64 },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `x' = y, y' = -x - ε (f(x) y + sgn(y) g(x))` with `deg f = n`, `deg g = m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LienardSystem {
    pub n: usize,
    pub m: usize,
    /// `a_0 ..= a_n`
    pub f: Vec<PiExt>,
    /// `b_0 ..= b_m`
    pub g: Vec<PiExt>,
    #[serde(skip_serializing_if = "is_zero_f64")]
    pub epsilon: f64,
}

fn is_zero_f64(v: &f64) -> bool {
    *v == 0.0
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    n: usize,
    m: usize,
    f: Vec<PiExt>,
    g: Vec<PiExt>,
    #[serde(default)]
    epsilon: f64,
}

impl<'de> Deserialize<'de> for LienardSystem {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawSystem::deserialize(deserializer)?;
        LienardSystem::with_degrees(raw.n, raw.m, raw.f, raw.g, raw.epsilon)
            .map_err(serde::de::Error::custom)
    }
}

impl LienardSystem {
    /// Degrees are read off the coefficient vectors.
    pub fn new(f: Vec<PiExt>, g: Vec<PiExt>, epsilon: f64) -> Result<Self, AveragingError> {
        let n = f.len().saturating_sub(1);
        let m = g.len().saturating_sub(1);
        Self::with_degrees(n, m, f, g, epsilon)
    }

    pub fn with_degrees(
        n: usize,
        m: usize,
        f: Vec<PiExt>,
        g: Vec<PiExt>,
        epsilon: f64,
    ) -> Result<Self, AveragingError> {
        let invalid = |msg: String| Err(AveragingError::InvalidSystem(msg));
        if n < 1 || m < 1 {
            return invalid(format!("degrees must satisfy n >= 1 and m >= 1 (got n = {n}, m = {m})"));
        }
        if f.len() != n + 1 {
            return invalid(format!("f has {} coefficients, expected n + 1 = {}", f.len(), n + 1));
        }
        if g.len() != m + 1 {
            return invalid(format!("g has {} coefficients, expected m + 1 = {}", g.len(), m + 1));
        }
        if f[n].is_zero() {
            return invalid(format!("leading coefficient a{n} of f is zero"));
        }
        if g[m].is_zero() {
            return invalid(format!("leading coefficient b{m} of g is zero"));
        }
        if !epsilon.is_finite() {
            return invalid(format!("epsilon must be finite (got {epsilon})"));
        }
        Ok(LienardSystem { n, m, f, g, epsilon })
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Self {
        LienardSystem { epsilon, ..self.clone() }
    }

    /// The four-cycle example system: `f = (8x⁴/225 - 52x²/45 - 476/225)/π`,
    /// `g = x² + 4/15`, with cycles near radii 1, 2, 3 and 4.
    pub fn four_cycle_example(epsilon: f64) -> Self {
        let over_pi = |p: i64, q: i64| PiExt::over_pi(Rational::frac(p, q));
        let f = vec![
            over_pi(-476, 225),
            PiExt::zero(),
            over_pi(-52, 45),
            PiExt::zero(),
            over_pi(8, 225),
        ];
        let g = vec![
            PiExt::rational(Rational::frac(4, 15)),
            PiExt::zero(),
            PiExt::from(1),
        ];
        LienardSystem::new(f, g, epsilon).expect("valid example")
    }
}

/// `F0(r) = Σ c_k r^k`, exact.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedFunction {
    pub coeffs: Vec<PiExt>,
}

impl AveragedFunction {
    pub fn degree(&self) -> Option<usize> {
        poly::degree(&self.coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.degree().is_none()
    }

    pub fn eval_exact(&self, r: &Rational) -> PiExt {
        poly::eval_exact(&self.coeffs, r)
    }

    pub fn eval(&self, r: f64) -> f64 {
        poly::horner(&poly::to_f64(&self.coeffs), r)
    }

    pub fn derivative(&self) -> Vec<PiExt> {
        poly::derivative(&self.coeffs)
    }

    pub fn decimal(&self) -> Vec<f64> {
        poly::to_f64(&self.coeffs)
    }

    /// Human-readable form, e.g. `(1/2)r + (2/pi)`.
    pub fn render(&self) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*r"),
                _ => format!("({c})*r^{k}"),
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join(" + ")
        }
    }
}

impl Serialize for AveragedFunction {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("AveragedFunction", 3)?;
        st.serialize_field("coeffs", &self.coeffs)?;
        st.serialize_field("decimal", &self.decimal())?;
        st.serialize_field("display", &self.render())?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for AveragedFunction {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            coeffs: Vec<PiExt>,
        }
        Ok(AveragedFunction { coeffs: Raw::deserialize(deserializer)?.coeffs })
    }
}

fn binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::from(1u32), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// `α_k` with `∫₀^{2π} cos^{2k}θ sin²θ dθ = π α_k`.
pub fn wallis_alpha(k: u32) -> Rational {
    let numer = binomial(2 * k as u64, k as u64);
    let denom = num_traits::pow(BigInt::from(4u32), k as usize) * BigInt::from(k + 1);
    Rational::new(numer, denom).expect("positive denominator")
}

pub fn averaged_function(sys: &LienardSystem) -> Result<AveragedFunction, AveragingError> {
    let degree = (2 * (sys.n / 2) + 1).max(2 * (sys.m / 2));
    let mut coeffs = vec![PiExt::zero(); degree + 1];
    for i in 0..=sys.n / 2 {
        let factor = wallis_alpha(i as u32) * Rational::frac(1, 2);
        coeffs[2 * i + 1] = sys.f[2 * i].scale(&factor);
    }
    for j in 0..=sys.m / 2 {
        let b = &sys.g[2 * j];
        if !b.is_rational() {
            return Err(AveragingError::OutsideField { index: 2 * j, value: b.to_string() });
        }
        let factor = Rational::frac(2, 2 * j as i64 + 1);
        coeffs[2 * j] = b.scale(&factor).try_div_pi()?;
    }
    Ok(AveragedFunction { coeffs })
}

/// Number of sign variations in the coefficient sequence, an upper bound on
/// the number of positive roots.
pub fn descartes_bound(p: &AveragedFunction) -> Result<usize, AveragingError> {
    if p.is_zero() {
        return Err(AveragingError::ZeroPolynomial);
    }
    Ok(poly::sign_variations(&p.coeffs))
}

/// `⌊n/2⌋ + ⌊m/2⌋ + 1`, the number of limit cycles the averaged function can
/// produce for `deg f = n`, `deg g = m`.
pub fn predicted_cycle_count(n: usize, m: usize) -> Result<usize, AveragingError> {
    if n < 1 || m < 1 {
        return Err(AveragingError::InvalidArgument(format!(
            "degrees must satisfy n >= 1 and m >= 1 (got n = {n}, m = {m})"
        )));
    }
    Ok(n / 2 + m / 2 + 1)
}

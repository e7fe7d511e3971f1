use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize};

use super::pi::pi_interval;
use super::{rational_from_json, ExactError, Rational};

/// Exact number `rat + pi_inv / π` with rational parts.
///
/// Closed under addition and rational scaling. Products of two elements are
/// only defined while at most one factor carries a `1/π` part.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct PiExt {
    pub rat: Rational,
    pub pi_inv: Rational,
}

impl PiExt {
    pub fn new(rat: Rational, pi_inv: Rational) -> Self {
        PiExt { rat, pi_inv }
    }

    pub fn zero() -> Self {
        PiExt::default()
    }

    pub fn rational(rat: Rational) -> Self {
        PiExt { rat, pi_inv: Rational::zero() }
    }

    /// `q / π`.
    pub fn over_pi(pi_inv: Rational) -> Self {
        PiExt { rat: Rational::zero(), pi_inv }
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.pi_inv.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.pi_inv.is_zero()
    }

    pub fn scale(&self, c: &Rational) -> PiExt {
        PiExt { rat: &self.rat * c, pi_inv: &self.pi_inv * c }
    }

    /// Product of two field elements. Fails when both carry a `1/π` part,
    /// since the result would need a `1/π²` term.
    pub fn try_mul(&self, other: &PiExt) -> Result<PiExt, ExactError> {
        if self.is_rational() {
            Ok(other.scale(&self.rat))
        } else if other.is_rational() {
            Ok(self.scale(&other.rat))
        } else {
            Err(ExactError::OutsideField(format!("({self}) * ({other})")))
        }
    }

    /// `self / π`, defined only for rational `self`.
    pub fn try_div_pi(&self) -> Result<PiExt, ExactError> {
        if self.is_rational() {
            Ok(PiExt::over_pi(self.rat.clone()))
        } else {
            Err(ExactError::OutsideField(format!("({self}) / pi")))
        }
    }

    /// `self * π`, defined only when the rational part vanishes.
    pub fn try_mul_pi(&self) -> Result<PiExt, ExactError> {
        if self.rat.is_zero() {
            Ok(PiExt::rational(self.pi_inv.clone()))
        } else {
            Err(ExactError::OutsideField(format!("({self}) * pi")))
        }
    }

    /// Interval `[lo, hi]` containing `rat·π + pi_inv`, the value scaled by π.
    fn scaled_enclosure(&self, digits: usize) -> (Rational, Rational) {
        let (pi_lo, pi_hi) = pi_interval(digits);
        let a = &self.rat * &pi_lo + &self.pi_inv;
        let b = &self.rat * &pi_hi + &self.pi_inv;
        if a <= b { (a, b) } else { (b, a) }
    }

    /// Sign of the real value. Exact: π is enclosed in rational intervals
    /// of growing precision until the enclosure excludes zero.
    pub fn sign(&self) -> i32 {
        if self.pi_inv.is_zero() {
            return self.rat.signum();
        }
        if self.rat.is_zero() {
            return self.pi_inv.signum();
        }
        let mut digits = 30;
        loop {
            let (lo, hi) = self.scaled_enclosure(digits);
            if lo.signum() > 0 {
                return 1;
            }
            if hi.signum() < 0 {
                return -1;
            }
            // p·π + q = 0 has no rational solution with p ≠ 0.
            digits *= 2;
        }
    }

    /// Numeric value with relative error at most `10^(1 - precision_digits)`
    /// (floored at the binary64 rounding of the final conversion).
    pub fn to_real(&self, precision_digits: usize) -> f64 {
        if self.pi_inv.is_zero() {
            return self.rat.to_f64();
        }
        let digits = precision_digits.max(15);
        let tol = Rational::new(1, num_traits::pow(num_bigint::BigInt::from(10u32), digits - 1))
            .expect("nonzero");
        let mut work = digits + 5;
        loop {
            let (pi_lo, pi_hi) = pi_interval(work);
            // value = rat + pi_inv/π, monotone in π.
            let v1 = &self.rat + &(&self.pi_inv / &pi_lo);
            let v2 = &self.rat + &(&self.pi_inv / &pi_hi);
            let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
            let width = &hi - &lo;
            let floor = if lo.signum() == hi.signum() {
                if lo.signum() > 0 { lo.clone() } else { hi.abs() }
            } else {
                Rational::zero()
            };
            if !floor.is_zero() && width <= &tol * &floor {
                let mid = (lo + hi) * Rational::frac(1, 2);
                return mid.to_f64();
            }
            work *= 2;
        }
    }

    /// Value to binary64 precision.
    pub fn to_f64(&self) -> f64 {
        self.to_real(17)
    }
}

impl Add<&PiExt> for &PiExt {
    type Output = PiExt;
    fn add(self, rhs: &PiExt) -> PiExt {
        PiExt { rat: &self.rat + &rhs.rat, pi_inv: &self.pi_inv + &rhs.pi_inv }
    }
}

impl Add for PiExt {
    type Output = PiExt;
    fn add(self, rhs: PiExt) -> PiExt {
        &self + &rhs
    }
}

impl Sub<&PiExt> for &PiExt {
    type Output = PiExt;
    fn sub(self, rhs: &PiExt) -> PiExt {
        PiExt { rat: &self.rat - &rhs.rat, pi_inv: &self.pi_inv - &rhs.pi_inv }
    }
}

impl Sub for PiExt {
    type Output = PiExt;
    fn sub(self, rhs: PiExt) -> PiExt {
        &self - &rhs
    }
}

impl Neg for PiExt {
    type Output = PiExt;
    fn neg(self) -> PiExt {
        PiExt { rat: -self.rat, pi_inv: -self.pi_inv }
    }
}

impl Neg for &PiExt {
    type Output = PiExt;
    fn neg(self) -> PiExt {
        PiExt { rat: -&self.rat, pi_inv: -&self.pi_inv }
    }
}

impl From<Rational> for PiExt {
    fn from(rat: Rational) -> Self {
        PiExt::rational(rat)
    }
}

impl From<i64> for PiExt {
    fn from(value: i64) -> Self {
        PiExt::rational(Rational::integer(value))
    }
}

impl fmt::Display for PiExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.rat.is_zero(), self.pi_inv.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.rat),
            (true, false) => write!(f, "({})/pi", self.pi_inv),
            (false, false) => write!(f, "{} + ({})/pi", self.rat, self.pi_inv),
        }
    }
}

impl fmt::Debug for PiExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse a JSON coefficient: a number, a rational string, or an object
/// `{"rat": ..., "pi_inv": ...}` (either key may be omitted).
pub fn piext_from_json(value: &serde_json::Value) -> Result<PiExt, ExactError> {
    match value {
        serde_json::Value::Object(map) => {
            let mut out = PiExt::zero();
            for (key, v) in map {
                match key.as_str() {
                    "rat" => out.rat = rational_from_json(v)?,
                    "pi_inv" => out.pi_inv = rational_from_json(v)?,
                    other => return Err(ExactError::UnknownKey(other.to_string())),
                }
            }
            Ok(out)
        }
        scalar => rational_from_json(scalar).map(PiExt::rational),
    }
}

impl<'de> Deserialize<'de> for PiExt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        piext_from_json(&value).map_err(serde::de::Error::custom)
    }
}

//! Dense univariate polynomials over the `p + q/π` field, coefficients in
//! increasing degree.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactnum::{pi_interval, PiExt, Rational};

/// Degree of the highest nonzero coefficient, `None` for the zero polynomial.
pub fn degree(coeffs: &[PiExt]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

pub fn trim(coeffs: &[PiExt]) -> Vec<PiExt> {
    match degree(coeffs) {
        Some(d) => coeffs[..=d].to_vec(),
        None => Vec::new(),
    }
}

/// Exact value at a rational point.
pub fn eval_exact(coeffs: &[PiExt], r: &Rational) -> PiExt {
    coeffs
        .iter()
        .rev()
        .fold(PiExt::zero(), |acc, c| &acc.scale(r) + c)
}

/// Exact sign at a rational point.
pub fn sign_at(coeffs: &[PiExt], r: &Rational) -> i32 {
    ScaledPoly::new(coeffs).sign_at(r)
}

pub fn derivative(coeffs: &[PiExt]) -> Vec<PiExt> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c.scale(&Rational::integer(k as i64)))
        .collect()
}

/// Sign changes along the nonzero coefficients.
pub fn sign_variations(coeffs: &[PiExt]) -> usize {
    let mut last = 0;
    let mut count = 0;
    for c in coeffs {
        let s = c.sign();
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

/// Upper bound on the number of roots in the open interval `(lo, hi)`,
/// exact when it is 0 or 1: the sign variations of
/// `(1 + x)^d · p((lo + hi·x) / (1 + x))`.
pub fn interval_variations(coeffs: &[PiExt], lo: &Rational, hi: &Rational) -> usize {
    ScaledPoly::new(coeffs).interval_variations(lo, hi)
}

/// Sign of `r·π + q`.
fn sign_pi_combination(r: &BigInt, q: &BigInt) -> i32 {
    let sign = |v: &BigInt| match v.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    };
    let (sr, sq) = (sign(r), sign(q));
    if sr == 0 || sq == 0 || sr == sq {
        return if sr != 0 { sr } else { sq };
    }
    let (ar, aq) = (r.abs(), q.abs());
    let mut digits = 40;
    loop {
        let (lo, hi) = pi_interval(digits);
        if &ar * hi.numer() < &aq * hi.denom() {
            return sq;
        }
        if &ar * lo.numer() > &aq * lo.denom() {
            return sr;
        }
        // |r|π = |q| is impossible for nonzero integers.
        digits *= 2;
    }
}

/// In-place `c(y) -> c(y + a)`.
fn taylor_shift(c: &mut [BigInt], a: &BigInt) {
    let d = c.len().saturating_sub(1);
    for i in 0..d {
        for j in (i..d).rev() {
            let carry = &c[j + 1] * a;
            c[j] += carry;
        }
    }
}

/// A polynomial over `p + q/π` multiplied by a positive integer `L` so
/// that `L·π·p(x) = Σ (R_k π + Q_k) x^k` with integer `R_k`, `Q_k`. Signs
/// are then decided in integer arithmetic.
#[derive(Debug, Clone)]
pub struct ScaledPoly {
    rat: Vec<BigInt>,
    pi: Vec<BigInt>,
}

impl ScaledPoly {
    pub fn new(coeffs: &[PiExt]) -> Self {
        let coeffs = trim(coeffs);
        let l = coeffs
            .iter()
            .flat_map(|c| [c.rat.denom(), c.pi_inv.denom()])
            .fold(BigInt::one(), |acc, d| acc.lcm(d));
        let scale = |r: &Rational| r.numer() * (&l / r.denom());
        ScaledPoly {
            rat: coeffs.iter().map(|c| scale(&c.rat)).collect(),
            pi: coeffs.iter().map(|c| scale(&c.pi_inv)).collect(),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.rat.len().checked_sub(1)
    }

    /// Exact sign at a rational point.
    pub fn sign_at(&self, x: &Rational) -> i32 {
        let Some(d) = self.degree() else {
            return 0;
        };
        // M^d p(N/M) = Σ C_k N^k M^(d-k)
        let (n, m) = (x.numer(), x.denom());
        let mut mpow = BigInt::one();
        let mut r = BigInt::zero();
        let mut q = BigInt::zero();
        for k in (0..=d).rev() {
            r = r * n + &self.rat[k] * &mpow;
            q = q * n + &self.pi[k] * &mpow;
            mpow *= m;
        }
        sign_pi_combination(&r, &q)
    }

    pub fn interval_variations(&self, lo: &Rational, hi: &Rational) -> usize {
        let Some(d) = self.degree() else {
            return 0;
        };
        let den = lo.denom().lcm(hi.denom());
        let a = lo.numer() * (&den / lo.denom());
        let b = hi.numer() * (&den / hi.denom());
        let width = &b - &a;
        let transform = |coeffs: &[BigInt]| {
            // x = y / den, then y = a + width·t, then t = 1 / (1 + z)
            let mut c: Vec<BigInt> = coeffs.to_vec();
            let mut pow = BigInt::one();
            for k in (0..=d).rev() {
                c[k] *= &pow;
                pow *= &den;
            }
            taylor_shift(&mut c, &a);
            let mut pow = BigInt::one();
            for ck in c.iter_mut() {
                *ck *= &pow;
                pow *= &width;
            }
            c.reverse();
            taylor_shift(&mut c, &BigInt::one());
            c
        };
        let (r, q) = (transform(&self.rat), transform(&self.pi));
        let mut last = 0;
        let mut count = 0;
        for (rk, qk) in r.iter().zip(&q) {
            let s = sign_pi_combination(rk, qk);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }
}

/// Divide by the monic `(r - root)`. Returns quotient and remainder.
pub fn deflate(coeffs: &[PiExt], root: &Rational) -> (Vec<PiExt>, PiExt) {
    if coeffs.is_empty() {
        return (Vec::new(), PiExt::zero());
    }
    let n = coeffs.len();
    let mut quotient = vec![PiExt::zero(); n - 1];
    let mut carry = PiExt::zero();
    for k in (0..n).rev() {
        let value = &coeffs[k] + &carry.scale(root);
        if k == 0 {
            return (quotient, value);
        }
        quotient[k - 1] = value.clone();
        carry = value;
    }
    unreachable!()
}

/// Numeric coefficients.
pub fn to_f64(coeffs: &[PiExt]) -> Vec<f64> {
    coeffs.iter().map(PiExt::to_f64).collect()
}

/// Horner evaluation in floating point.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

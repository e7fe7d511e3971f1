//! Rational enclosures of π.
//!
//! Up to [`STORED_DIGITS`] decimals come from a bundled expansion; beyond
//! that Machin's formula is evaluated in fixed-point big-integer arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::Rational;

const PI_DECIMALS: &str = "141592653589793238462643383279502884197169399375105820974944592307816406286208998628034825342117067982148086513282306647093";

/// Number of correct decimals in the bundled expansion.
pub const STORED_DIGITS: usize = 120;

fn pow10(exp: usize) -> BigInt {
    num_traits::pow(BigInt::from(10u32), exp)
}

/// Returns `(lo, hi)` with `lo < π < hi` and `hi - lo <= 10^-digits`.
pub fn pi_interval(digits: usize) -> (Rational, Rational) {
    let digits = digits.max(1);
    if digits <= STORED_DIGITS {
        let truncated: BigInt = format!("3{}", &PI_DECIMALS[..digits])
            .parse()
            .expect("bundled digits parse");
        let scale = pow10(digits);
        let lo = Rational::new(truncated.clone(), scale.clone()).expect("nonzero");
        let hi = Rational::new(truncated + 1, scale).expect("nonzero");
        return (lo, hi);
    }
    machin_interval(digits)
}

/// arctan(1/x) * 10^scale_digits, truncated term by term. Returns the
/// approximation and the number of terms summed (each term carries at most
/// one unit of truncation error).
fn arctan_inv_fixed(x: u32, scale: &BigInt) -> (BigInt, usize) {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = scale / &x;
    let mut sum = BigInt::zero();
    let mut k = 0usize;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    (sum, k)
}

fn machin_interval(digits: usize) -> (Rational, Rational) {
    let guard = 12;
    let scale = pow10(digits + guard);
    let (a5, n5) = arctan_inv_fixed(5, &scale);
    let (a239, n239) = arctan_inv_fixed(239, &scale);
    let approx = BigInt::from(16) * a5 - BigInt::from(4) * a239;
    // Each truncated division contributes < 1 unit, weighted by 16 and 4.
    let slack = BigInt::from(16 * (2 * n5 + 2) + 4 * (2 * n239 + 2)) + BigInt::one();
    let lo = Rational::new(&approx - &slack, scale.clone()).expect("nonzero");
    let hi = Rational::new(&approx + &slack, scale).expect("nonzero");
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stored_interval_brackets_pi() {
        let (lo, hi) = pi_interval(15);
        assert!(lo.to_f64() <= std::f64::consts::PI);
        assert!(hi.to_f64() >= std::f64::consts::PI);
        assert_eq!(hi - lo, Rational::new(1, pow10(15)).unwrap());
    }

    #[test]
    fn machin_agrees_with_stored_digits() {
        let (slo, shi) = pi_interval(STORED_DIGITS);
        let (mlo, mhi) = machin_interval(STORED_DIGITS);
        // Both enclosures must overlap and be tight.
        assert!(mlo < shi && slo < mhi);
        let width = &mhi - &mlo;
        assert!(width < Rational::new(1, pow10(STORED_DIGITS)).unwrap());
    }

    #[test]
    fn machin_beyond_stored_digits() {
        let (lo, hi) = pi_interval(300);
        let (slo, shi) = pi_interval(STORED_DIGITS);
        assert!(slo <= lo && hi <= shi);
        assert!(&hi - &lo <= Rational::new(1, pow10(300)).unwrap());
    }
}

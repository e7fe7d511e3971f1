//! Exact scalars: big rationals and the field of numbers `p + q/π`.

mod pi;
mod piext;
mod rational;

use thiserror::Error;

pub use pi::{pi_interval, STORED_DIGITS};
pub use piext::{piext_from_json, PiExt};
pub use rational::{rational_from_json, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite float {0} has no rational value")]
    NonFinite(f64),
    #[error("cannot parse `{0}` as a rational (expected p/q, an integer or a decimal)")]
    Parse(String),
    #[error("unknown key `{0}` in coefficient object (expected rat, pi_inv)")]
    UnknownKey(String),
    #[error("result leaves the p + q/pi field: {0}")]
    OutsideField(String),
}

/// Numeric value of `x` to `precision_digits` significant decimals.
pub fn pi_ext_to_real(x: &PiExt, precision_digits: usize) -> f64 {
    x.to_real(precision_digits)
}

/// Sign of `x` in {-1, 0, 1}; zero only for the zero element.
pub fn pi_ext_sign(x: &PiExt) -> i32 {
    x.sign()
}

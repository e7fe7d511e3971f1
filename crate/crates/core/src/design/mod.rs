//! Inverse design: choose the even coefficients of `f` and `g` so that the
//! averaged function vanishes at prescribed radii.
//!
//! Writing `A_{2i} = π a_{2i}` turns every equation `π F0(t) = 0` into
//!
//! ```text
//! Σ_i (α_i / 2) t^{2i+1} A_{2i} + Σ_j 2 t^{2j} / (2j+1) b_{2j} = 0
//! ```
//!
//! which has rational coefficients and is solved exactly. One even
//! coefficient is pinned to fix the scale.

mod linsolve;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::averaging::{
    averaged_function, positive_roots, predicted_cycle_count, wallis_alpha, AveragingError,
    LienardSystem, RootOptions,
};
use crate::exactnum::{ExactError, PiExt, Rational};
use crate::poly;

pub use linsolve::{solve as solve_rational, Singular};

/// Largest allowed gap between a designed root and its target.
pub const ROOT_MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("invalid design problem: {0}")]
    Invalid(String),
    #[error("singular linear system (no pivot for unknown {unknown}); the targets admit no solution under the given pins")]
    Singular { unknown: CoeffId },
    #[error("solution leaves the p + q/pi field: {0}")]
    OutsideField(String),
    #[error("designed system is degenerate: {0}")]
    Degenerate(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Averaging(#[from] AveragingError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Names a coefficient: `a3` is the x³ coefficient of `f`, `b0` the
/// constant term of `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoeffId {
    F(usize),
    G(usize),
}

impl CoeffId {
    pub fn index(self) -> usize {
        match self {
            CoeffId::F(i) | CoeffId::G(i) => i,
        }
    }

    pub fn is_even(self) -> bool {
        self.index() % 2 == 0
    }
}

impl fmt::Display for CoeffId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffId::F(i) => write!(f, "a{i}"),
            CoeffId::G(i) => write!(f, "b{i}"),
        }
    }
}

impl FromStr for CoeffId {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || DesignError::Invalid(format!("bad coefficient name `{s}` (expected a<k> or b<k>)"));
        let s = s.trim();
        let (head, tail) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
        let index: usize = tail.parse().map_err(|_| bad())?;
        match head {
            "a" => Ok(CoeffId::F(index)),
            "b" => Ok(CoeffId::G(index)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for CoeffId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CoeffId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignProblem {
    pub n: usize,
    pub m: usize,
    /// Desired cycle radii, strictly increasing and positive.
    pub targets: Vec<Rational>,
    /// Exactly one even coefficient (the normalization) plus any odd
    /// coefficients the caller wants set.
    #[serde(default)]
    pub fixed: BTreeMap<CoeffId, PiExt>,
    /// Coefficients forced to zero.
    #[serde(default)]
    pub zeroed: BTreeSet<CoeffId>,
}

impl DesignProblem {
    /// Targets with the default normalization: the highest even
    /// coefficient of `g` pinned to 1.
    pub fn new(n: usize, m: usize, targets: Vec<Rational>) -> Self {
        let mut fixed = BTreeMap::new();
        fixed.insert(CoeffId::G(2 * (m / 2)), PiExt::from(1));
        DesignProblem { n, m, targets, fixed, zeroed: BTreeSet::new() }
    }

    pub fn with_pin(mut self, id: CoeffId, value: PiExt) -> Self {
        self.fixed.retain(|k, _| !k.is_even());
        self.fixed.insert(id, value);
        self
    }

    pub fn zero(mut self, id: CoeffId) -> Self {
        self.zeroed.insert(id);
        self
    }

    fn in_range(&self, id: CoeffId) -> bool {
        match id {
            CoeffId::F(i) => i <= self.n,
            CoeffId::G(j) => j <= self.m,
        }
    }

    /// The even coefficient fixing the scale.
    pub fn pin(&self) -> Result<(CoeffId, &PiExt), DesignError> {
        let mut evens = self.fixed.iter().filter(|(k, _)| k.is_even());
        match (evens.next(), evens.next()) {
            (Some((id, v)), None) => Ok((*id, v)),
            (None, _) => Err(DesignError::Invalid("no even coefficient is pinned".into())),
            (Some(_), Some(_)) => Err(DesignError::Invalid(
                "exactly one even coefficient may be pinned".into(),
            )),
        }
    }

    /// Even coefficients left for the solver, in the order `a_0, a_2, ...,
    /// b_0, b_2, ...`.
    pub fn unknowns(&self) -> Result<Vec<CoeffId>, DesignError> {
        let (pin, _) = self.pin()?;
        let evens = (0..=self.n / 2)
            .map(|i| CoeffId::F(2 * i))
            .chain((0..=self.m / 2).map(|j| CoeffId::G(2 * j)));
        Ok(evens.filter(|id| *id != pin && !self.zeroed.contains(id)).collect())
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        let invalid = |msg: String| Err(DesignError::Invalid(msg));
        if self.n < 1 || self.m < 1 {
            return invalid(format!("degrees must satisfy n >= 1 and m >= 1 (got n = {}, m = {})", self.n, self.m));
        }
        for id in self.fixed.keys().chain(self.zeroed.iter()) {
            if !self.in_range(*id) {
                return invalid(format!("coefficient {id} is out of range for n = {}, m = {}", self.n, self.m));
            }
            if self.fixed.contains_key(id) && self.zeroed.contains(id) {
                return invalid(format!("coefficient {id} is both fixed and zeroed"));
            }
        }
        let (pin, value) = self.pin()?;
        if value.is_zero() {
            return invalid(format!("pinned coefficient {pin} must be nonzero"));
        }
        if let Some(first) = self.targets.first() {
            if first.signum() <= 0 {
                return invalid("targets must be positive".into());
            }
        }
        if self.targets.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("targets must be strictly increasing".into());
        }
        let unknowns = self.unknowns()?.len();
        if self.targets.len() != unknowns {
            return invalid(format!(
                "{} targets given but {} even coefficients are free (expected {} with no zeroed even coefficients)",
                self.targets.len(),
                unknowns,
                predicted_cycle_count(self.n, self.m)?
            ));
        }
        Ok(())
    }
}

/// Coefficient of unknown `id` in the scaled equation `π F0(t) = 0`, in the
/// variables `A_{2i} = π a_{2i}` and `b_{2j}`.
fn scaled_column(id: CoeffId, t: &Rational) -> Rational {
    match id {
        CoeffId::F(k) => {
            let i = (k / 2) as u32;
            wallis_alpha(i) * Rational::frac(1, 2) * t.pow(k as u32 + 1)
        }
        CoeffId::G(k) => Rational::frac(2, k as i64 + 1) * t.pow(k as u32),
    }
}

/// Solves for the even coefficients; returns the Liénard system with
/// `epsilon = 0` (the averaged function does not depend on ε).
pub fn design_cycles(problem: &DesignProblem) -> Result<LienardSystem, DesignError> {
    problem.validate()?;
    let (pin, pin_value) = problem.pin()?;
    let unknowns = problem.unknowns()?;

    // Solve with the pinned variable set to 1; the system is linear and
    // homogeneous, so the real solution is this one scaled.
    let matrix: Vec<Vec<Rational>> = problem
        .targets
        .iter()
        .map(|t| unknowns.iter().map(|id| scaled_column(*id, t)).collect())
        .collect();
    let rhs: Vec<Rational> = problem.targets.iter().map(|t| -scaled_column(pin, t)).collect();
    let unit = linsolve::solve(matrix, rhs).map_err(|s| DesignError::Singular { unknown: unknowns[s.column] })?;

    let mut f = vec![PiExt::zero(); problem.n + 1];
    let mut g = vec![PiExt::zero(); problem.m + 1];
    let mut assign = |id: CoeffId, value: PiExt| match id {
        CoeffId::F(i) => f[i] = value,
        CoeffId::G(j) => g[j] = value,
    };

    // Actual value of the pinned variable in the scaled unknowns: b itself,
    // or A = π a. Each solved coefficient is that value times its unit
    // solution, mapped back (a = A / π).
    match pin {
        CoeffId::G(_) => {
            if !pin_value.is_rational() {
                return Err(DesignError::OutsideField(format!(
                    "pinned {pin} = {pin_value} must be rational"
                )));
            }
            let w = &pin_value.rat;
            for (id, s) in unknowns.iter().zip(&unit) {
                let scaled = s * w;
                let value = match id {
                    CoeffId::F(_) => PiExt::over_pi(scaled),
                    CoeffId::G(_) => PiExt::rational(scaled),
                };
                assign(*id, value);
            }
        }
        CoeffId::F(_) => {
            for (id, s) in unknowns.iter().zip(&unit) {
                let value = match id {
                    CoeffId::F(_) => pin_value.scale(s),
                    CoeffId::G(_) => pin_value.scale(s).try_mul_pi().map_err(|_| {
                        DesignError::OutsideField(format!(
                            "pinning {pin} = {pin_value} makes {id} a multiple of pi; pin a value of the form q/pi instead"
                        ))
                    })?,
                };
                assign(*id, value);
            }
        }
    }
    assign(pin, pin_value.clone());
    for (id, value) in problem.fixed.iter().filter(|(k, _)| !k.is_even()) {
        assign(*id, value.clone());
    }
    // The degree of f (or g) is part of the system; an odd leading
    // coefficient left unset defaults to 1, which leaves F0 unchanged.
    for (lead, len, is_f) in [(problem.n, f.len(), true), (problem.m, g.len(), false)] {
        let id = if is_f { CoeffId::F(lead) } else { CoeffId::G(lead) };
        let slot = if is_f { &mut f[len - 1] } else { &mut g[len - 1] };
        if slot.is_zero() {
            if id.is_even() || problem.zeroed.contains(&id) {
                return Err(DesignError::Degenerate(format!("leading coefficient {id} is zero")));
            }
            *slot = PiExt::from(1);
        }
    }

    let system = LienardSystem::with_degrees(problem.n, problem.m, f, g, 0.0)?;
    verify_design(&system, problem)?;
    Ok(system)
}

/// Checks that the designed averaged function vanishes exactly at every
/// target and has no other positive root.
fn verify_design(system: &LienardSystem, problem: &DesignProblem) -> Result<(), DesignError> {
    let avg = averaged_function(system)?;
    for t in &problem.targets {
        if !avg.eval_exact(t).is_zero() {
            return Err(DesignError::Verification(format!("F0({t}) is not exactly zero")));
        }
    }
    let roots = positive_roots(&avg, &RootOptions::default())?;
    if roots.len() != problem.targets.len() {
        return Err(DesignError::Verification(format!(
            "averaged function has {} positive roots, expected {}",
            roots.len(),
            problem.targets.len()
        )));
    }
    for (root, t) in roots.iter().zip(&problem.targets) {
        let t = t.to_f64();
        if (root.value - t).abs() > ROOT_MATCH_TOL * t.max(1.0) {
            return Err(DesignError::Verification(format!("root {} does not match target {t}", root.value)));
        }
    }
    if system.g[0].is_zero() {
        log::warn!("designed b0 is zero; F0 vanishes at r = 0 and the crossing-region setup needs b0 != 0");
    }
    Ok(())
}

/// Averaged function divided by `Π (r - t)` over the targets.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualCheck {
    /// Quotient coefficients, lowest degree first.
    pub quotient: Vec<PiExt>,
    /// Product of the magnitudes of the roots not assigned to targets.
    pub magnitude_product: f64,
    /// The single leftover root when the quotient is linear.
    pub linear_root: Option<f64>,
    /// Positive roots of the quotient; empty for an accepted design.
    pub positive_residuals: Vec<f64>,
}

pub fn residual_roots(system: &LienardSystem, targets: &[Rational]) -> Result<ResidualCheck, DesignError> {
    let avg = averaged_function(system)?;
    let mut quotient = poly::trim(&avg.coeffs);
    for t in targets {
        let (q, rem) = poly::deflate(&quotient, t);
        if !rem.is_zero() {
            return Err(DesignError::Verification(format!("{t} is not a root of the averaged function")));
        }
        quotient = q;
    }
    let q = poly::to_f64(&quotient);
    let d = q.len().saturating_sub(1);
    let low = quotient.iter().position(|c| !c.is_zero()).unwrap_or(0);
    // Roots at zero contribute zero magnitude.
    let magnitude_product = if low > 0 { 0.0 } else { (q[0] / q[d]).abs() };
    let linear_root = (d == 1).then(|| -q[0] / q[1]);
    let positive_residuals = if d >= 1 {
        let qf = crate::averaging::AveragedFunction { coeffs: quotient.clone() };
        positive_roots(&qf, &RootOptions::default())?.into_iter().map(|r| r.value).collect()
    } else {
        Vec::new()
    };
    Ok(ResidualCheck { quotient, magnitude_product, linear_root, positive_residuals })
}

/// Product of the magnitudes of the averaged-function roots left over
/// after removing the targets.
pub fn fifth_root_check(system: &LienardSystem, targets: &[Rational]) -> Result<f64, DesignError> {
    Ok(residual_roots(system, targets)?.magnitude_product)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averaging::averaged_quadrature;

    fn ints(values: &[i64]) -> Vec<Rational> {
        values.iter().map(|&v| Rational::integer(v)).collect()
    }

    fn over_pi(p: i64, q: i64) -> PiExt {
        PiExt::over_pi(Rational::frac(p, q))
    }

    fn four_cycle_problem() -> DesignProblem {
        DesignProblem::new(4, 2, ints(&[1, 2, 3, 4]))
            .zero(CoeffId::F(1))
            .zero(CoeffId::F(3))
            .zero(CoeffId::G(1))
    }

    #[test]
    fn reproduces_four_cycle_solution() {
        let sys = design_cycles(&four_cycle_problem()).unwrap();
        assert_eq!(sys.f[0], over_pi(-476, 225));
        assert_eq!(sys.f[2], over_pi(-52, 45));
        assert_eq!(sys.f[4], over_pi(8, 225));
        assert_eq!(sys.g[0], PiExt::rational(Rational::frac(4, 15)));
        assert_eq!(sys.g[2], PiExt::from(1));
        assert!(sys.f[1].is_zero() && sys.f[3].is_zero() && sys.g[1].is_zero());
        assert_eq!(sys, LienardSystem::four_cycle_example(0.0));
    }

    #[test]
    fn solution_is_linear_in_the_pin() {
        let base = design_cycles(&four_cycle_problem()).unwrap();
        let doubled = design_cycles(&four_cycle_problem().with_pin(CoeffId::G(2), PiExt::from(2))).unwrap();
        for (x, y) in base.f.iter().zip(&doubled.f).chain(base.g.iter().zip(&doubled.g)) {
            assert_eq!(x.scale(&Rational::integer(2)), *y);
        }
    }

    #[test]
    fn f_pin_needs_q_over_pi_form() {
        // n = 2, m = 1, targets (1, 2): a2 = 1 forces b0 = 3π/8.
        let problem = DesignProblem::new(2, 1, ints(&[1, 2])).with_pin(CoeffId::F(2), PiExt::from(1));
        assert!(matches!(design_cycles(&problem), Err(DesignError::OutsideField(_))));

        let problem = DesignProblem::new(2, 1, ints(&[1, 2]))
            .with_pin(CoeffId::F(2), PiExt::over_pi(Rational::one()));
        let sys = design_cycles(&problem).unwrap();
        assert_eq!(sys.f[0], over_pi(-7, 4));
        assert_eq!(sys.g[0], PiExt::rational(Rational::frac(3, 8)));
        // odd leading coefficient of g defaults to 1
        assert_eq!(sys.g[1], PiExt::from(1));
        for r in [1.0, 2.0] {
            assert!(averaged_quadrature(&sys, r).abs() < 1e-9);
        }
    }

    #[test]
    fn repeated_or_unsorted_targets_rejected() {
        let p = DesignProblem::new(4, 2, ints(&[1, 2, 2, 4]));
        assert!(matches!(design_cycles(&p), Err(DesignError::Invalid(_))));
        let p = DesignProblem::new(4, 2, ints(&[1, 2, 3]));
        assert!(matches!(design_cycles(&p), Err(DesignError::Invalid(_))));
    }

    #[test]
    fn zeroed_even_coefficient_reduces_unknowns() {
        let p = DesignProblem::new(4, 2, ints(&[1, 2, 3, 4])).zero(CoeffId::F(0));
        assert!(matches!(design_cycles(&p), Err(DesignError::Invalid(_))));
        // a0 = 0: F0 = r (a2 r^2 / 8 + a4 r^4 / 16) + 2 (b0 + b2 r^2 / 3) / pi
        let p = DesignProblem::new(4, 2, ints(&[1, 2, 3])).zero(CoeffId::F(0));
        let sys = design_cycles(&p).unwrap();
        assert!(sys.f[0].is_zero());
        for r in [1.0, 2.0, 3.0] {
            assert!(averaged_quadrature(&sys, r).abs() < 1e-9);
        }
    }

    #[test]
    fn residual_root_of_four_cycle_design() {
        let sys = design_cycles(&four_cycle_problem()).unwrap();
        let check = residual_roots(&sys, &ints(&[1, 2, 3, 4])).unwrap();
        assert_eq!(check.linear_root, Some(-10.0));
        assert!(check.positive_residuals.is_empty());
        assert!((fifth_root_check(&sys, &ints(&[1, 2, 3, 4])).unwrap() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn capacity_matching_design_has_no_residual_positive_root() {
        let sys = design_cycles(&DesignProblem::new(3, 3, ints(&[1, 3, 5]))).unwrap();
        let check = residual_roots(&sys, &ints(&[1, 3, 5])).unwrap();
        assert!(check.positive_residuals.is_empty());
    }

    #[test]
    fn coeff_id_parsing() {
        assert_eq!("a4".parse::<CoeffId>().unwrap(), CoeffId::F(4));
        assert_eq!("b0".parse::<CoeffId>().unwrap(), CoeffId::G(0));
        assert!("c1".parse::<CoeffId>().is_err());
        assert!("a".parse::<CoeffId>().is_err());
        assert_eq!(CoeffId::G(2).to_string(), "b2");
    }

    #[test]
    fn problem_json_round_trip() {
        let p = four_cycle_problem();
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains(r#""fixed":{"b2":{"rat":"1/1","pi_inv":"0/1"}}"#));
        let back: DesignProblem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
    }
}

//! Piecewise-smooth integration across the switching line `Σ = {y = 0}`.
//!
//! Above Σ the flow follows `X = (y, -x - ε(f(x) y + g(x)))`, below it
//! `Y = (y, -x - ε(f(x) y - g(x)))`. Orbits turn clockwise, so a return to
//! the positive x-axis is a lower half-turn followed by an upper one.

mod rk;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::averaging::LienardSystem;
use crate::poly::horner;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("step limit of {steps} exceeded")]
    MaxStepsExceeded { steps: usize },
    #[error("section hit at x = {x} is not a crossing point ({class:?})")]
    SlidingEncountered { x: f64, class: BoundaryClass },
    #[error("non-finite state at t = {t}")]
    NonFiniteState { t: f64 },
    #[error("orbit from x0 = {x0} did not return to the positive x-axis (second hit at x = {x})")]
    NoReturn { x0: f64, x: f64 },
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("invalid start: {0}")]
    InvalidStart(String),
    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl State {
    pub fn new(x: f64, y: f64, t: f64) -> Self {
        State { x, y, t }
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Largest `|y|` accepted at a located section hit.
    pub event_tol: f64,
    /// Section crossings allowed in one trajectory simulation.
    pub max_transits: usize,
    /// Integration steps allowed in one half-plane transit.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: 0.1,
            event_tol: 1e-12,
            max_transits: 1000,
            max_steps: 1_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("rtol", self.rtol),
            ("atol", self.atol),
            ("max_step", self.max_step),
            ("event_tol", self.event_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SimError::InvalidConfig(format!("{name} must be positive (got {v})")));
            }
        }
        if self.max_transits == 0 || self.max_steps == 0 {
            return Err(SimError::InvalidConfig("max_transits and max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryClass {
    Crossing,
    Sliding,
    Escaping,
    Tangency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Upper,
    Lower,
}

impl Half {
    pub fn sign(self) -> f64 {
        match self {
            Half::Upper => 1.0,
            Half::Lower => -1.0,
        }
    }

    pub fn other(self) -> Half {
        match self {
            Half::Upper => Half::Lower,
            Half::Lower => Half::Upper,
        }
    }
}

/// Floating-point view of a [`LienardSystem`] for integration.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericSystem {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub epsilon: f64,
}

impl From<&LienardSystem> for NumericSystem {
    fn from(sys: &LienardSystem) -> Self {
        NumericSystem {
            f: sys.f.iter().map(|c| c.to_f64()).collect(),
            g: sys.g.iter().map(|c| c.to_f64()).collect(),
            epsilon: sys.epsilon,
        }
    }
}

impl NumericSystem {
    pub fn f_at(&self, x: f64) -> f64 {
        horner(&self.f, x)
    }

    pub fn g_at(&self, x: f64) -> f64 {
        horner(&self.g, x)
    }

    fn field(&self, half: Half, u: [f64; 2]) -> [f64; 2] {
        let [x, y] = u;
        [y, -x - self.epsilon * (self.f_at(x) * y + half.sign() * self.g_at(x))]
    }

    /// `Xh·Yh = x² - ε² g(x)²` at `(x, 0)`.
    pub fn crossing_product(&self, x: f64) -> f64 {
        let eg = self.epsilon * self.g_at(x);
        x * x - eg * eg
    }

    /// Lie derivatives of `h(x, y) = y` along the upper and lower fields at
    /// `(x, 0)`.
    pub fn lie_derivatives(&self, x: f64) -> (f64, f64) {
        let eg = self.epsilon * self.g_at(x);
        (-x - eg, -x + eg)
    }

    pub fn classify(&self, x: f64, tol: f64) -> BoundaryClass {
        let (xh, yh) = self.lie_derivatives(x);
        if xh.abs() <= tol || yh.abs() <= tol {
            BoundaryClass::Tangency
        } else if xh * yh > 0.0 {
            BoundaryClass::Crossing
        } else if xh < 0.0 && yh > 0.0 {
            BoundaryClass::Sliding
        } else {
            BoundaryClass::Escaping
        }
    }
}

/// Vector field above Σ.
pub fn field_upper(s: &State, sys: &LienardSystem) -> (f64, f64) {
    let [dx, dy] = NumericSystem::from(sys).field(Half::Upper, [s.x, s.y]);
    (dx, dy)
}

/// Vector field below Σ.
pub fn field_lower(s: &State, sys: &LienardSystem) -> (f64, f64) {
    let [dx, dy] = NumericSystem::from(sys).field(Half::Lower, [s.x, s.y]);
    (dx, dy)
}

/// Classifies `(x, 0) ∈ Σ` by the signs of the two Lie derivatives; values
/// within `tol` of zero count as tangency.
pub fn classify_boundary(x: f64, sys: &LienardSystem, tol: f64) -> BoundaryClass {
    NumericSystem::from(sys).classify(x, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransitEnd {
    /// Reached Σ; `y` is snapped to zero.
    Hit(State),
    /// Stopped at the requested final time inside the half-plane.
    TimeLimit(State),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transit {
    pub end: TransitEnd,
    pub steps: usize,
}

impl NumericSystem {
    /// Integrates with the field of `half` from `s0` until Σ is reached (or
    /// `t_stop`). Accepted states are appended to `path` when given.
    pub fn transit(
        &self,
        s0: State,
        half: Half,
        cfg: &IntegratorConfig,
        t_stop: Option<f64>,
        mut path: Option<&mut Vec<State>>,
    ) -> Result<Transit, SimError> {
        let sgn = half.sign();
        if !s0.is_finite() {
            return Err(SimError::NonFiniteState { t: s0.t });
        }
        if s0.y * sgn < 0.0 {
            return Err(SimError::InvalidStart(format!("start y = {} lies outside the {half:?} half-plane", s0.y)));
        }
        let rhs = |u: [f64; 2]| self.field(half, u);
        let mut u = [s0.x, s0.y];
        let mut t = s0.t;
        let mut h = (0.1 * cfg.max_step).min(cfg.max_step);
        let mut steps = 0usize;
        let mut left_sigma = s0.y * sgn > 0.0;

        loop {
            if let Some(stop) = t_stop {
                if t >= stop {
                    return Ok(Transit { end: TransitEnd::TimeLimit(State::new(u[0], u[1], t)), steps });
                }
                h = h.min(stop - t);
            }
            if steps >= cfg.max_steps {
                return Err(SimError::MaxStepsExceeded { steps });
            }
            let (next, err) = rk::step(&rhs, u, h);
            steps += 1;
            if !(next[0].is_finite() && next[1].is_finite()) {
                return Err(SimError::NonFiniteState { t: t + h });
            }
            let norm = rk::error_norm(u, next, err, cfg.rtol, cfg.atol);
            if norm > 1.0 {
                h *= rk::step_factor(norm);
                if h < 1e-14 * (1.0 + t.abs()) {
                    return Err(SimError::StepSizeUnderflow { t });
                }
                continue;
            }

            if next[1] * sgn <= 0.0 {
                if !left_sigma {
                    // The field does not carry the orbit off Σ into this half.
                    return Err(SimError::SlidingEncountered {
                        x: s0.x,
                        class: self.classify(s0.x, cfg.event_tol),
                    });
                }
                let (tau, hit) = self.locate_hit(&rhs, u, next, h, cfg.event_tol);
                let hit = State::new(hit[0], 0.0, t + tau);
                if let Some(p) = path.as_deref_mut() {
                    p.push(hit);
                }
                self.certify_crossing(hit.x, cfg)?;
                return Ok(Transit { end: TransitEnd::Hit(hit), steps });
            }

            left_sigma = true;
            u = next;
            t += h;
            if let Some(p) = path.as_deref_mut() {
                p.push(State::new(u[0], u[1], t));
            }
            h = (h * rk::step_factor(norm)).min(cfg.max_step);
        }
    }

    /// Finds `tau ∈ (0, h]` with `|y(tau)| <= event_tol` by regula falsi
    /// (Illinois variant) on the step length, re-integrating a single step
    /// from `u` each time.
    fn locate_hit<F: Fn([f64; 2]) -> [f64; 2]>(
        &self,
        rhs: &F,
        u: [f64; 2],
        end: [f64; 2],
        h: f64,
        event_tol: f64,
    ) -> (f64, [f64; 2]) {
        if end[1] == 0.0 {
            return (h, end);
        }
        let (mut a, mut ya) = (0.0, u[1]);
        let (mut b, mut yb) = (h, end[1]);
        let mut best = (h, end);
        let mut side = 0i32;
        for _ in 0..200 {
            let mut tau = (a * yb - b * ya) / (yb - ya);
            if !(tau > a && tau < b) {
                tau = 0.5 * (a + b);
            }
            let state = rk::step(rhs, u, tau).0;
            let y = state[1];
            best = (tau, state);
            if y.abs() <= event_tol || b - a <= 1e-15 * h.max(1.0) {
                break;
            }
            if (y > 0.0) == (ya > 0.0) {
                a = tau;
                ya = y;
                if side == -1 {
                    yb *= 0.5;
                }
                side = -1;
            } else {
                b = tau;
                yb = y;
                if side == 1 {
                    ya *= 0.5;
                }
                side = 1;
            }
        }
        best
    }

    /// A section hit is only accepted at a crossing point away from
    /// tangency: `|x| > ε|g(x)| + event_tol` and `x² - ε²g(x)² > 0`.
    fn certify_crossing(&self, x: f64, cfg: &IntegratorConfig) -> Result<(), SimError> {
        let margin = (self.epsilon * self.g_at(x)).abs() + cfg.event_tol;
        if x.abs() <= margin || self.crossing_product(x) <= 0.0 {
            return Err(SimError::SlidingEncountered { x, class: self.classify(x, cfg.event_tol) });
        }
        Ok(())
    }

    /// Lower half-turn from `(x0, 0)` followed by the upper half-turn back to
    /// the positive x-axis.
    pub fn return_map(&self, x0: f64, cfg: &IntegratorConfig) -> Result<ReturnSample, SimError> {
        self.return_with_path(x0, cfg, None)
    }

    fn return_with_path(
        &self,
        x0: f64,
        cfg: &IntegratorConfig,
        mut path: Option<&mut Vec<State>>,
    ) -> Result<ReturnSample, SimError> {
        if !(x0 > 0.0) || !x0.is_finite() {
            return Err(SimError::InvalidStart(format!("x0 must be positive (got {x0})")));
        }
        self.certify_crossing(x0, cfg)?;
        let start = State::new(x0, 0.0, 0.0);
        if let Some(p) = path.as_deref_mut() {
            p.push(start);
        }
        let first = match self.transit(start, Half::Lower, cfg, None, path.as_deref_mut())?.end {
            TransitEnd::Hit(s) => s,
            TransitEnd::TimeLimit(_) => unreachable!("no time limit set"),
        };
        if first.x >= 0.0 {
            return Err(SimError::NoReturn { x0, x: first.x });
        }
        let second = match self.transit(first, Half::Upper, cfg, None, path)?.end {
            TransitEnd::Hit(s) => s,
            TransitEnd::TimeLimit(_) => unreachable!("no time limit set"),
        };
        if second.x <= 0.0 {
            return Err(SimError::NoReturn { x0, x: second.x });
        }
        Ok(ReturnSample { x0, image: second.x, period: second.t, hits: [first, second] })
    }
}

/// One evaluation of the return map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReturnSample {
    pub x0: f64,
    /// `P(x0)`
    pub image: f64,
    /// Flow time of the full return.
    pub period: f64,
    /// Negative-axis and positive-axis section hits.
    pub hits: [State; 2],
}

impl ReturnSample {
    /// `D(x0) = P(x0) - x0`
    pub fn displacement(&self) -> f64 {
        self.image - self.x0
    }
}

/// Transit from `s0` within `half` until Σ is reached.
pub fn integrate_transit(
    s0: State,
    half: Half,
    sys: &LienardSystem,
    cfg: &IntegratorConfig,
) -> Result<(State, usize), SimError> {
    cfg.validate()?;
    let transit = NumericSystem::from(sys).transit(s0, half, cfg, None, None)?;
    match transit.end {
        TransitEnd::Hit(s) => Ok((s, transit.steps)),
        TransitEnd::TimeLimit(_) => unreachable!("no time limit set"),
    }
}

/// First-return map on the positive x-axis.
pub fn poincare_map(x0: f64, sys: &LienardSystem, cfg: &IntegratorConfig) -> Result<f64, SimError> {
    cfg.validate()?;
    Ok(NumericSystem::from(sys).return_map(x0, cfg)?.image)
}

/// States along one full return from `(x0, 0)`, including both section hits.
pub fn return_orbit(x0: f64, sys: &LienardSystem, cfg: &IntegratorConfig) -> Result<Vec<State>, SimError> {
    cfg.validate()?;
    let mut path = Vec::new();
    NumericSystem::from(sys).return_with_path(x0, cfg, Some(&mut path))?;
    Ok(path)
}

/// Trajectory from `seed` up to time `t_end`, switching fields at every
/// crossing of Σ.
pub fn simulate(
    seed: State,
    t_end: f64,
    sys: &LienardSystem,
    cfg: &IntegratorConfig,
) -> Result<Vec<State>, SimError> {
    cfg.validate()?;
    let num = NumericSystem::from(sys);
    let mut half = if seed.y > 0.0 {
        Half::Upper
    } else if seed.y < 0.0 {
        Half::Lower
    } else {
        match num.classify(seed.x, cfg.event_tol) {
            // Both fields agree on the direction of y' at a crossing point.
            BoundaryClass::Crossing if num.lie_derivatives(seed.x).0 > 0.0 => Half::Upper,
            BoundaryClass::Crossing => Half::Lower,
            class => return Err(SimError::SlidingEncountered { x: seed.x, class }),
        }
    };
    let mut path = vec![seed];
    let mut state = seed;
    for _ in 0..cfg.max_transits {
        match num.transit(state, half, cfg, Some(t_end), Some(&mut path))?.end {
            TransitEnd::TimeLimit(_) => return Ok(path),
            TransitEnd::Hit(hit) => {
                state = hit;
                half = half.other();
            }
        }
    }
    Ok(path)
}

/// Linear grid of return-map starting points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanWindow {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Default for ScanWindow {
    fn default() -> Self {
        ScanWindow { lo: 0.25, hi: 5.0, count: 200 }
    }
}

impl ScanWindow {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| if i + 1 == self.count { self.hi } else { self.lo + step * i as f64 })
            .collect()
    }

    fn validate(&self) -> Result<(), SimError> {
        if !(self.lo > 0.0 && self.lo < self.hi && self.hi.is_finite()) || self.count < 2 {
            return Err(SimError::InvalidConfig(format!(
                "scan window needs 0 < lo < hi and count >= 2 (got {}:{}:{})",
                self.lo, self.hi, self.count
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanSample {
    pub x0: f64,
    pub outcome: Result<ReturnSample, SimError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    /// Fixed point of the return map on the positive x-axis.
    pub radius: f64,
    pub stability: Stability,
    pub period: f64,
    /// Scan points whose displacements bracket the fixed point.
    pub bracket: (f64, f64),
    pub bracket_displacements: (f64, f64),
    /// `P'(x*)` by central differences; diagnostic only.
    pub multiplier: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleScan {
    pub cycles: Vec<CycleRecord>,
    pub samples: Vec<ScanSample>,
    /// Every displacement on the grid is within integration noise, as for
    /// the unperturbed center.
    pub degenerate: bool,
    /// All section hits accepted while scanning and refining.
    pub section_hits: Vec<State>,
}

/// Displacement below which `D` is indistinguishable from integration error.
fn noise_floor(x: f64, cfg: &IntegratorConfig) -> f64 {
    10.0 * cfg.rtol * x.abs().max(1.0) + cfg.atol
}

/// Scans `D(x) = P(x) - x` over the window and refines every sign change to
/// a fixed point.
pub fn find_limit_cycles(
    sys: &LienardSystem,
    cfg: &IntegratorConfig,
    scan: &ScanWindow,
) -> Result<CycleScan, SimError> {
    cfg.validate()?;
    scan.validate()?;
    let num = NumericSystem::from(sys);
    let samples: Vec<ScanSample> = scan
        .points()
        .into_par_iter()
        .map(|x0| ScanSample { x0, outcome: num.return_map(x0, cfg) })
        .collect();
    let mut section_hits: Vec<State> = samples
        .iter()
        .filter_map(|s| s.outcome.as_ref().ok())
        .flat_map(|r| r.hits)
        .collect();

    let ok: Vec<&ReturnSample> = samples.iter().filter_map(|s| s.outcome.as_ref().ok()).collect();
    let degenerate = ok.iter().all(|r| r.displacement().abs() <= noise_floor(r.x0, cfg));
    if degenerate {
        return Ok(CycleScan { cycles: Vec::new(), samples, degenerate, section_hits });
    }

    let brackets: Vec<(ReturnSample, ReturnSample)> = ok
        .windows(2)
        .filter(|w| w[0].displacement() * w[1].displacement() < 0.0)
        .map(|w| (*w[0], *w[1]))
        .collect();

    let refined: Vec<Result<(CycleRecord, Vec<State>), SimError>> = brackets
        .par_iter()
        .map(|(left, right)| refine_cycle(&num, cfg, left, right))
        .collect();
    let mut cycles = Vec::new();
    for result in refined {
        match result {
            Ok((cycle, hits)) => {
                cycles.push(cycle);
                section_hits.extend(hits);
            }
            Err(err) => log::warn!("cycle refinement failed: {err}"),
        }
    }
    cycles.sort_by(|a, b| a.radius.total_cmp(&b.radius));
    Ok(CycleScan { cycles, samples, degenerate, section_hits })
}

fn refine_cycle(
    num: &NumericSystem,
    cfg: &IntegratorConfig,
    left: &ReturnSample,
    right: &ReturnSample,
) -> Result<(CycleRecord, Vec<State>), SimError> {
    let mut hits = Vec::new();
    let (mut a, mut da) = (left.x0, left.displacement());
    let (mut b, mut db) = (right.x0, right.displacement());
    let mut best = if da.abs() < db.abs() { *left } else { *right };
    let mut side = 0i32;
    let xtol = 1e-11 * b.abs().max(1.0);
    for _ in 0..200 {
        if b - a <= xtol {
            break;
        }
        let mut x = (a * db - b * da) / (db - da);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let sample = num.return_map(x, cfg)?;
        hits.extend(sample.hits);
        let d = sample.displacement();
        best = sample;
        if d == 0.0 {
            break;
        }
        if (d > 0.0) == (da > 0.0) {
            a = x;
            da = d;
            if side == -1 {
                db *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            db = d;
            if side == 1 {
                da *= 0.5;
            }
            side = 1;
        }
    }
    let radius = best.x0;
    // Orbits approach from both sides when D > 0 to the left and D < 0 to the right.
    let stability = if left.displacement() > 0.0 { Stability::Stable } else { Stability::Unstable };
    let step = 1e-4 * radius;
    let multiplier = match (num.return_map(radius + step, cfg), num.return_map(radius - step, cfg)) {
        (Ok(p), Ok(m)) => Some((p.image - m.image) / (2.0 * step)),
        _ => None,
    };
    let cycle = CycleRecord {
        radius,
        stability,
        period: best.period,
        bracket: (left.x0, right.x0),
        bracket_displacements: (left.displacement(), right.displacement()),
        multiplier,
    };
    Ok((cycle, hits))
}

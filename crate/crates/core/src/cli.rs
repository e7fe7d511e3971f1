//! Command-line surface: JSON run configurations and the `lienard` binary's
//! subcommands.

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::averaging::{
    averaged_function, descartes_bound, positive_roots, predicted_cycle_count, AveragingError, LienardSystem,
    RootOptions,
};
use crate::design::{design_cycles, CoeffId, DesignError, DesignProblem};
use crate::exactnum::{PiExt, Rational};
use crate::pipeline::{
    emit_plot_data, fmt_f64, poincare_csv, run_verification, trajectory_csv, PipelineError, ScanRow,
    VerifyOptions, DEFAULT_MATCH_TOL,
};
use crate::simulator::{find_limit_cycles, simulate, IntegratorConfig, ScanWindow, SimError, State};

const DEFAULT_OUT_DIR: &str = "lienard-out";
const DEFAULT_T_END: f64 = 50.0;

/// Design targets and normalization inside a run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignBlock {
    pub targets: Vec<Rational>,
    /// Empty means the default normalization.
    #[serde(default)]
    pub fixed: BTreeMap<CoeffId, PiExt>,
    #[serde(default)]
    pub zeroed: BTreeSet<CoeffId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<PiExt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<PiExt>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanWindow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<DesignBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub match_tol: Option<f64>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema violation at `{key}`: {message}")]
    Schema { key: String, message: String },
    #[error("length mismatch for `{key}`: expected {expected} coefficients, found {found}")]
    LengthMismatch { key: String, expected: usize, found: usize },
}

impl ConfigError {
    fn diagnostic(&self) -> serde_json::Value {
        match self {
            ConfigError::Read { path, .. } => json!({ "path": path }),
            ConfigError::Parse { line, column, .. } => json!({ "line": line, "column": column }),
            ConfigError::Schema { key, .. } => json!({ "key": key }),
            ConfigError::LengthMismatch { key, expected, found } => {
                json!({ "key": key, "expected": expected, "found": found })
            }
        }
    }
}

fn schema(key: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema { key: key.to_string(), message: message.into() }
}

/// serde reports the offending key inside backticks; pull it out.
fn key_from_message(message: &str) -> Option<String> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(message[start..start + len].to_string())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| {
            let message = e.to_string();
            match (e.classify(), key_from_message(&message)) {
                (serde_json::error::Category::Data, Some(key)) => ConfigError::Schema { key, message },
                _ => ConfigError::Parse { line: e.line(), column: e.column(), message },
            }
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        match (&self.f, &self.g, &self.design) {
            (Some(_), None, _) | (None, None, None) => {
                return Err(schema("g", "missing field `g` (required unless a design block is given)"))
            }
            (None, Some(_), _) => return Err(schema("f", "missing field `f`")),
            _ => {}
        }
        if let (Some(f), Some(g)) = (&self.f, &self.g) {
            for (key, coeffs, degree) in [("f", f, self.n), ("g", g, self.m)] {
                if coeffs.len() != degree + 1 {
                    return Err(ConfigError::LengthMismatch {
                        key: key.into(),
                        expected: degree + 1,
                        found: coeffs.len(),
                    });
                }
            }
            LienardSystem::with_degrees(self.n, self.m, f.clone(), g.clone(), self.epsilon.unwrap_or(0.0))
                .map_err(|e| schema("f", e.to_string()))?;
        }
        if let Some(eps) = self.epsilon {
            if !eps.is_finite() {
                return Err(schema("epsilon", format!("must be finite (got {eps})")));
            }
        }
        self.integrator.validate().map_err(|e| schema("integrator", e.to_string()))?;
        if let Some(tol) = self.match_tol {
            if !(tol > 0.0) {
                return Err(schema("match_tol", format!("must be positive (got {tol})")));
            }
        }
        Ok(())
    }

    /// The system given by `f` and `g`, if present.
    pub fn system(&self) -> Option<LienardSystem> {
        let (f, g) = (self.f.clone()?, self.g.clone()?);
        LienardSystem::with_degrees(self.n, self.m, f, g, self.epsilon.unwrap_or(0.0)).ok()
    }

    pub fn design_problem(&self) -> Option<DesignProblem> {
        let block = self.design.as_ref()?;
        let mut problem = DesignProblem::new(self.n, self.m, block.targets.clone());
        if !block.fixed.is_empty() {
            problem.fixed = block.fixed.clone();
        }
        problem.zeroed = block.zeroed.clone();
        Some(problem)
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    RunConfig::from_json(&text)
}

#[derive(Debug, Parser)]
#[command(name = "lienard", version, about = "Limit cycles of discontinuous Lienard systems via averaging")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Print the averaged function exactly and in decimal.
    Average,
    /// Print the cycle-count bound for degrees n and m.
    Bound,
    /// Print the simple positive roots of the averaged function.
    Roots,
    /// Solve for a system with cycles at the given radii.
    Design,
    /// Print a trajectory from --seed as CSV.
    Simulate,
    /// Print return-map samples over the scan window as CSV.
    Poincare,
    /// Compare averaged roots with simulated cycles and write plot data.
    Verify,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Comma-separated cycle radii, e.g. 1,2,3,4 or 1/2,3/2.
    #[arg(long, global = true, value_delimiter = ',')]
    pub targets: Vec<Rational>,
    /// Pinned coefficient such as b2=1 or a2=3/4/pi.
    #[arg(long, global = true, value_name = "NAME=VALUE", value_parser = parse_pin)]
    pub pin: Vec<(CoeffId, PiExt)>,
    /// Coefficient forced to zero, e.g. b0.
    #[arg(long, global = true, value_name = "NAME")]
    pub zero: Vec<CoeffId>,
    #[arg(long, global = true, value_name = "LO:HI:N", value_parser = parse_scan)]
    pub scan: Option<ScanWindow>,
    /// Output directory for plot data.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rtol: Option<f64>,
    #[arg(long, global = true)]
    pub atol: Option<f64>,
    #[arg(long, global = true)]
    pub event_tol: Option<f64>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Initial state for simulate.
    #[arg(long, global = true, value_name = "X,Y", allow_hyphen_values = true, value_parser = parse_seed)]
    pub seed: Option<(f64, f64)>,
    #[arg(long, global = true)]
    pub t_end: Option<f64>,
    #[arg(long, global = true)]
    pub match_tol: Option<f64>,
}

/// `NAME=VALUE` where VALUE is a rational, optionally followed by `/pi`.
pub fn parse_pin(s: &str) -> Result<(CoeffId, PiExt), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let id: CoeffId = name.trim().parse().map_err(|e| format!("{e}"))?;
    let value = value.trim();
    let stripped = value.strip_suffix("/pi").or_else(|| value.strip_suffix("/π"));
    let parsed = match stripped {
        Some(q) => PiExt::over_pi(q.parse::<Rational>().map_err(|e| e.to_string())?),
        None => PiExt::rational(value.parse::<Rational>().map_err(|e| e.to_string())?),
    };
    Ok((id, parsed))
}

pub fn parse_scan(s: &str) -> Result<ScanWindow, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        return Err(format!("expected LO:HI:N, got `{s}`"));
    };
    let window = ScanWindow {
        lo: lo.trim().parse().map_err(|e| format!("bad LO: {e}"))?,
        hi: hi.trim().parse().map_err(|e| format!("bad HI: {e}"))?,
        count: count.trim().parse().map_err(|e| format!("bad N: {e}"))?,
    };
    if !(window.lo > 0.0 && window.lo < window.hi && window.hi.is_finite() && window.count >= 2) {
        return Err(format!("scan window needs 0 < LO < HI and N >= 2, got `{s}`"));
    }
    Ok(window)
}

pub fn parse_seed(s: &str) -> Result<(f64, f64), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected X,Y, got `{s}`"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("bad X: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("bad Y: {e}"))?;
    if !(x.is_finite() && y.is_finite()) {
        return Err("seed must be finite".into());
    }
    Ok((x, y))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Averaging(#[from] AveragingError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("{unmatched} of {total} averaged roots have no simulated cycle within {match_tol}")]
    Unmatched { unmatched: usize, total: usize, match_tol: f64 },
    #[error("output error: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    /// Bad invocation or bad input files exit with 2, failed computations
    /// with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Design(DesignError::Invalid(_)) => 2,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Config(_) => "config",
            CliError::Averaging(_) => "averaging",
            CliError::Design(_) => "design",
            CliError::Simulation(_) => "simulation",
            CliError::Pipeline(_) => "pipeline",
            CliError::Unmatched { .. } => "unmatched",
            CliError::Output(_) => "output",
        }
    }

    pub fn diagnostic(&self) -> serde_json::Value {
        let mut value = json!({ "error": self.kind(), "message": self.to_string() });
        let extra = match self {
            CliError::Config(e) => e.diagnostic(),
            CliError::Unmatched { unmatched, total, match_tol } => {
                json!({ "unmatched": unmatched, "total": total, "match_tol": match_tol })
            }
            _ => json!({}),
        };
        if let (Some(obj), serde_json::Value::Object(more)) = (value.as_object_mut(), extra) {
            obj.extend(more);
        }
        value
    }
}

/// Flags layered over an optional config file.
struct Context {
    opts: Opts,
    config: Option<RunConfig>,
}

impl Context {
    fn new(opts: Opts) -> Result<Self, CliError> {
        let config = opts.config.as_deref().map(parse_config).transpose()?;
        Ok(Context { opts, config })
    }

    fn degrees(&self) -> Result<(usize, usize), CliError> {
        let n = self.opts.n.or(self.config.as_ref().map(|c| c.n));
        let m = self.opts.m.or(self.config.as_ref().map(|c| c.m));
        match (n, m) {
            (Some(n), Some(m)) => Ok((n, m)),
            _ => Err(CliError::Usage("degrees required: pass --n and --m or --config".into())),
        }
    }

    fn epsilon(&self) -> Option<f64> {
        self.opts.epsilon.or(self.config.as_ref().and_then(|c| c.epsilon))
    }

    fn integrator(&self) -> Result<IntegratorConfig, CliError> {
        let mut cfg = self.config.as_ref().map(|c| c.integrator.clone()).unwrap_or_default();
        if let Some(v) = self.opts.rtol {
            cfg.rtol = v;
        }
        if let Some(v) = self.opts.atol {
            cfg.atol = v;
        }
        if let Some(v) = self.opts.event_tol {
            cfg.event_tol = v;
        }
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    fn scan(&self) -> Option<ScanWindow> {
        self.opts.scan.or(self.config.as_ref().and_then(|c| c.scan))
    }

    fn design_problem(&self) -> Result<Option<DesignProblem>, CliError> {
        let from_config = self.config.as_ref().and_then(RunConfig::design_problem);
        let no_flags = self.opts.targets.is_empty() && self.opts.pin.is_empty() && self.opts.zero.is_empty();
        if no_flags && self.opts.n.is_none() && self.opts.m.is_none() {
            return Ok(from_config);
        }
        let targets = if self.opts.targets.is_empty() {
            match &from_config {
                Some(p) => p.targets.clone(),
                None => return Ok(None),
            }
        } else {
            self.opts.targets.clone()
        };
        let (n, m) = self.degrees()?;
        let mut problem = DesignProblem::new(n, m, targets);
        if self.opts.pin.is_empty() && self.opts.zero.is_empty() {
            if let Some(p) = from_config.filter(|p| p.n == n && p.m == m) {
                problem.fixed = p.fixed;
                problem.zeroed = p.zeroed;
            }
        }
        for (id, value) in &self.opts.pin {
            problem = if id.is_even() {
                problem.with_pin(*id, value.clone())
            } else {
                problem.fixed.insert(*id, value.clone());
                problem
            };
        }
        for id in &self.opts.zero {
            problem = problem.zero(*id);
        }
        Ok(Some(problem))
    }

    /// Explicit coefficients win; otherwise a design problem is solved.
    fn system(&self) -> Result<LienardSystem, CliError> {
        let eps = self.epsilon().unwrap_or(0.0);
        if let Some(sys) = self.config.as_ref().and_then(RunConfig::system) {
            return Ok(sys.with_epsilon(eps));
        }
        match self.design_problem()? {
            Some(problem) => Ok(design_cycles(&problem)?.with_epsilon(eps)),
            None => Err(CliError::Usage(
                "no system given: pass --config with f and g, or design targets".into(),
            )),
        }
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// Runs one subcommand, writing its result to `out` and warnings to `err`.
pub fn dispatch(command: Command, opts: Opts, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Context::new(opts)?;
    match command {
        Command::Average => {
            let avg = averaged_function(&ctx.system()?)?;
            write_json(out, &avg)
        }
        Command::Bound => {
            let has_system = ctx.config.as_ref().is_some_and(|c| c.f.is_some());
            if has_system && ctx.opts.n.is_none() && ctx.opts.m.is_none() {
                let sys = ctx.system()?;
                let avg = averaged_function(&sys)?;
                write_json(
                    out,
                    &json!({
                        "descartes_bound": descartes_bound(&avg)?,
                        "predicted_cycle_count": predicted_cycle_count(sys.n, sys.m)?,
                    }),
                )
            } else {
                let (n, m) = ctx.degrees()?;
                writeln!(out, "{}", predicted_cycle_count(n, m)?)?;
                Ok(())
            }
        }
        Command::Roots => {
            let avg = averaged_function(&ctx.system()?)?;
            write_json(out, &positive_roots(&avg, &RootOptions::default())?)
        }
        Command::Design => {
            let problem = ctx
                .design_problem()?
                .ok_or_else(|| CliError::Usage("design needs --targets or a design block in --config".into()))?;
            write_json(out, &design_cycles(&problem)?)
        }
        Command::Simulate => {
            let (x, y) = ctx.opts.seed.ok_or_else(|| CliError::Usage("simulate needs --seed X,Y".into()))?;
            let t_end = ctx.opts.t_end.unwrap_or(DEFAULT_T_END);
            if !(t_end > 0.0 && t_end.is_finite()) {
                return Err(CliError::Usage(format!("--t-end must be positive (got {t_end})")));
            }
            let path = simulate(State::new(x, y, 0.0), t_end, &ctx.system()?, &ctx.integrator()?)?;
            out.write_all(&trajectory_csv(&path)?)?;
            Ok(())
        }
        Command::Poincare => {
            let window = ctx.scan().unwrap_or_default();
            let scan = find_limit_cycles(&ctx.system()?, &ctx.integrator()?, &window)?;
            let mut rows = Vec::new();
            for sample in &scan.samples {
                match &sample.outcome {
                    Ok(r) => rows.push(ScanRow { x0: r.x0, image: r.image, displacement: r.displacement() }),
                    Err(e) => writeln!(
                        err,
                        "{}",
                        json!({ "warning": "sample failed", "x0": fmt_f64(sample.x0), "message": e.to_string() })
                    )?,
                }
            }
            out.write_all(&poincare_csv(&rows)?)?;
            Ok(())
        }
        Command::Verify => {
            let eps = ctx.epsilon().ok_or_else(|| CliError::Usage("verify needs --epsilon or `epsilon` in --config".into()))?;
            if eps == 0.0 {
                return Err(CliError::Usage("verify needs a nonzero epsilon".into()));
            }
            let sys = ctx.system()?.with_epsilon(eps);
            let match_tol = ctx
                .opts
                .match_tol
                .or(ctx.config.as_ref().and_then(|c| c.match_tol))
                .unwrap_or(DEFAULT_MATCH_TOL);
            let opts = VerifyOptions { match_tol, window: ctx.scan(), ..VerifyOptions::default() };
            let report = run_verification(&sys, &ctx.integrator()?, &opts)?;
            let dir = ctx
                .opts
                .out
                .clone()
                .or(ctx.config.as_ref().and_then(|c| c.out_dir.clone()))
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
            emit_plot_data(&report, &dir)?;
            write_json(out, &report)?;
            if report.fully_matched() {
                Ok(())
            } else {
                Err(CliError::Unmatched {
                    unmatched: report.unmatched_roots.len(),
                    total: report.averaged_roots.len(),
                    match_tol,
                })
            }
        }
    }
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// process exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, cli.opts, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", e.diagnostic());
            e.exit_code()
        }
    }
}

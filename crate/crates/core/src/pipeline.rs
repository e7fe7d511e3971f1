//! Averaged prediction against simulated return maps, and the files used to
//! plot the comparison.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::averaging::{averaged_function, positive_roots, AveragingError, LienardSystem, RootOptions, RootRecord};
use crate::simulator::{
    find_limit_cycles, return_orbit, CycleRecord, IntegratorConfig, ScanWindow, SimError, Stability,
};

/// Default largest distance between an averaged root and a simulated cycle.
pub const DEFAULT_MATCH_TOL: f64 = 0.1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Averaging(#[from] AveragingError),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub match_tol: f64,
    /// Return-map samples across the scan window.
    pub scan_count: usize,
    /// Overrides the window derived from the averaged roots.
    pub window: Option<ScanWindow>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { match_tol: DEFAULT_MATCH_TOL, scan_count: 200, window: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleMatch {
    pub root_index: usize,
    pub cycle_index: usize,
    pub distance: f64,
    /// Positive degree sign paired with a stable cycle, or negative with
    /// an unstable one.
    pub stability_agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub x0: f64,
    pub image: f64,
    pub displacement: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub x0: f64,
    pub error: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub system: LienardSystem,
    pub epsilon_used: f64,
    pub integrator: IntegratorConfig,
    pub window: ScanWindow,
    pub averaged_roots: Vec<RootRecord>,
    pub simulated_cycles: Vec<CycleRecord>,
    pub matches: Vec<CycleMatch>,
    pub unmatched_roots: Vec<usize>,
    pub unmatched_cycles: Vec<usize>,
    pub scan: Vec<ScanRow>,
    pub sample_failures: Vec<SampleFailure>,
    pub degenerate_scan: bool,
}

impl VerificationReport {
    pub fn fully_matched(&self) -> bool {
        self.unmatched_roots.is_empty() && !self.averaged_roots.is_empty()
    }
}

/// Pairs roots with cycles, nearest first, each at most once.
fn greedy_match(roots: &[RootRecord], cycles: &[CycleRecord], tol: f64) -> Vec<CycleMatch> {
    let mut pairs: Vec<(f64, usize, usize)> = roots
        .iter()
        .enumerate()
        .flat_map(|(i, r)| cycles.iter().enumerate().map(move |(j, c)| ((r.value - c.radius).abs(), i, j)))
        .filter(|(d, _, _)| *d < tol)
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut root_used = vec![false; roots.len()];
    let mut cycle_used = vec![false; cycles.len()];
    let mut matches = Vec::new();
    for (distance, i, j) in pairs {
        if root_used[i] || cycle_used[j] {
            continue;
        }
        root_used[i] = true;
        cycle_used[j] = true;
        let expected = if roots[i].degree_sign > 0 { Stability::Stable } else { Stability::Unstable };
        matches.push(CycleMatch {
            root_index: i,
            cycle_index: j,
            distance,
            stability_agrees: cycles[j].stability == expected,
        });
    }
    matches.sort_by_key(|m| m.root_index);
    matches
}

pub fn run_verification(
    sys: &LienardSystem,
    cfg: &IntegratorConfig,
    opts: &VerifyOptions,
) -> Result<VerificationReport, PipelineError> {
    if sys.epsilon == 0.0 {
        return Err(PipelineError::Precondition("epsilon must be nonzero for verification".into()));
    }
    if !(opts.match_tol > 0.0) {
        return Err(PipelineError::Precondition(format!("match tolerance must be positive (got {})", opts.match_tol)));
    }
    let avg = averaged_function(sys)?;
    let roots = positive_roots(&avg, &RootOptions::default())?;
    let window = opts.window.unwrap_or_else(|| match (roots.first(), roots.last()) {
        (Some(lo), Some(hi)) => ScanWindow { lo: 0.5 * lo.value, hi: 1.5 * hi.value, count: opts.scan_count },
        _ => ScanWindow { count: opts.scan_count, ..ScanWindow::default() },
    });
    let scan = find_limit_cycles(sys, cfg, &window)?;

    let matches = greedy_match(&roots, &scan.cycles, opts.match_tol);
    let unmatched_roots = (0..roots.len()).filter(|i| !matches.iter().any(|m| m.root_index == *i)).collect();
    let unmatched_cycles = (0..scan.cycles.len()).filter(|j| !matches.iter().any(|m| m.cycle_index == *j)).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for sample in &scan.samples {
        match &sample.outcome {
            Ok(r) => rows.push(ScanRow { x0: r.x0, image: r.image, displacement: r.displacement() }),
            Err(e) => failures.push(SampleFailure { x0: sample.x0, error: e.to_string() }),
        }
    }
    Ok(VerificationReport {
        system: sys.clone(),
        epsilon_used: sys.epsilon,
        integrator: cfg.clone(),
        window,
        averaged_roots: roots,
        simulated_cycles: scan.cycles,
        matches,
        unmatched_roots,
        unmatched_cycles,
        scan: rows,
        sample_failures: failures,
        degenerate_scan: scan.degenerate,
    })
}

/// 17 significant digits: enough to round-trip any binary64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

struct Emitter {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl Emitter {
    fn write(&mut self, rel: &str, contents: &[u8]) -> Result<(), PipelineError> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|source| PipelineError::Io { path: parent.to_path_buf(), source })?;
        }
        fs::write(&path, contents).map_err(|source| PipelineError::Io { path: path.clone(), source })?;
        let digest = Sha256::digest(contents);
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.entries.push(ManifestEntry { path: rel.to_string(), bytes: contents.len(), sha256 });
        Ok(())
    }
}

fn csv_bytes<I, R>(header: &[&str], rows: I) -> Result<Vec<u8>, PipelineError>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.flush().map_err(|source| PipelineError::Io { path: PathBuf::from("<csv>"), source })?;
    Ok(writer.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)
}

/// Scan rows as `x0,P,D` CSV.
pub fn poincare_csv(rows: &[ScanRow]) -> Result<Vec<u8>, PipelineError> {
    csv_bytes(
        &["x0", "P", "D"],
        rows.iter().map(|r| [fmt_f64(r.x0), fmt_f64(r.image), fmt_f64(r.displacement)]),
    )
}

/// States as `t,x,y` CSV.
pub fn trajectory_csv(states: &[crate::simulator::State]) -> Result<Vec<u8>, PipelineError> {
    csv_bytes(&["t", "x", "y"], states.iter().map(|s| [fmt_f64(s.t), fmt_f64(s.x), fmt_f64(s.y)]))
}

fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
    }
}

/// `D(x)` as a polyline with one marker per detected cycle.
pub fn displacement_svg(report: &VerificationReport) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 40.0;
    let (x_lo, x_hi) = (report.window.lo, report.window.hi);
    let d_max = report.scan.iter().map(|r| r.displacement.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let sx = |x: f64| PAD + (x - x_lo) / (x_hi - x_lo) * (W - 2.0 * PAD);
    let sy = |d: f64| H / 2.0 - d / d_max * (H / 2.0 - PAD);
    let points: Vec<String> = report
        .scan
        .iter()
        .map(|r| format!("{:.3},{:.3}", sx(r.x0), sy(r.displacement)))
        .collect();
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!("<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"));
    svg.push_str(&format!(
        "<line class=\"axis\" x1=\"{PAD}\" y1=\"{y:.3}\" x2=\"{x2}\" y2=\"{y:.3}\" stroke=\"gray\"/>\n",
        y = H / 2.0,
        x2 = W - PAD
    ));
    svg.push_str(&format!(
        "<polyline class=\"displacement\" fill=\"none\" stroke=\"black\" points=\"{}\"/>\n",
        points.join(" ")
    ));
    for c in &report.simulated_cycles {
        let color = match c.stability {
            Stability::Stable => "green",
            Stability::Unstable => "red",
        };
        svg.push_str(&format!(
            "<circle class=\"cycle\" cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"{color}\"/>\n",
            sx(c.radius),
            H / 2.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{PAD}\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">P(x) - x on [{}, {}], max |D| = {:.3e}</text>\n",
        x_lo, x_hi, d_max
    ));
    svg.push_str("</svg>\n");
    svg
}

/// Writes `poincare.csv`, `cycles.csv`, one `trajectories/cycle_<k>.csv`
/// per detected cycle, `displacement.svg` and `manifest.json` into
/// `out_dir`.
pub fn emit_plot_data(report: &VerificationReport, out_dir: &Path) -> Result<Manifest, PipelineError> {
    let mut out = Emitter { root: out_dir.to_path_buf(), entries: Vec::new() };
    out.write("poincare.csv", &poincare_csv(&report.scan)?)?;
    let cycles = csv_bytes(
        &["radius", "stability", "period"],
        report
            .simulated_cycles
            .iter()
            .map(|c| [fmt_f64(c.radius), stability_name(c.stability).to_string(), fmt_f64(c.period)]),
    )?;
    out.write("cycles.csv", &cycles)?;
    for (k, cycle) in report.simulated_cycles.iter().enumerate() {
        let orbit = return_orbit(cycle.radius, &report.system, &report.integrator)?;
        out.write(&format!("trajectories/cycle_{k}.csv"), &trajectory_csv(&orbit)?)?;
    }
    out.write("displacement.svg", displacement_svg(report).as_bytes())?;
    let manifest = Manifest { files: out.entries.clone() };
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    out.write("manifest.json", &json)?;
    Ok(manifest)
}

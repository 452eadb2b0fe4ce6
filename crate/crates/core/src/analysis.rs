//! Drive-detuning spectra, peak detection, rotation sensitivity of the side
//! peaks and analytic-vs-numeric comparison.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{CompositeOps, HilbertConfig};
use crate::liouville::steady_photon_numbers;
use crate::model::PhysicalParams;
use crate::moments::{n_weak_drive, slope_closed_form};

/// Which solver paths a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Numeric,
    Both,
}

impl Method {
    pub fn analytic(self) -> bool {
        matches!(self, Method::Analytic | Method::Both)
    }

    pub fn numeric(self) -> bool {
        matches!(self, Method::Numeric | Method::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Path {
    Analytic,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Peak {
    /// Parabolically refined position.
    pub position: f64,
    pub height: f64,
    /// Grid index of the discrete maximum.
    pub index: usize,
    pub grid_position: f64,
    pub mode: Mode,
    pub path: Path,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub grid: Vec<f64>,
    pub n_plus_analytic: Option<Vec<f64>>,
    pub n_minus_analytic: Option<Vec<f64>>,
    pub n_plus_numeric: Option<Vec<f64>>,
    pub n_minus_numeric: Option<Vec<f64>>,
    pub method: Method,
    pub peaks: Vec<Peak>,
}

impl SweepResult {
    pub fn series(&self, mode: Mode, path: Path) -> Option<&[f64]> {
        match (mode, path) {
            (Mode::Plus, Path::Analytic) => self.n_plus_analytic.as_deref(),
            (Mode::Minus, Path::Analytic) => self.n_minus_analytic.as_deref(),
            (Mode::Plus, Path::Numeric) => self.n_plus_numeric.as_deref(),
            (Mode::Minus, Path::Numeric) => self.n_minus_numeric.as_deref(),
        }
    }

    pub fn peaks_of(&self, mode: Mode, path: Path) -> Vec<Peak> {
        self.peaks.iter().filter(|p| p.mode == mode && p.path == path).copied().collect()
    }
}

/// Execution settings for numeric sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub hilbert: HilbertConfig,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { hilbert: HilbertConfig::default(), threads: Some(1) }
    }
}

/// n points from −w to w, with grid[i] = −grid[n−1−i] exactly.
pub fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => {
            let m = (n - 1) as f64;
            (0..n).map(|i| half_width * ((2.0 * i as f64 - m) / m)).collect()
        }
    }
}

/// n points from lo to hi.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if lo == -hi {
        return symmetric_grid(hi, n);
    }
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * (i as f64 / (n - 1) as f64)).collect(),
    }
}

pub const DEFAULT_SWEEP_POINTS: usize = 401;

/// 401 points over Ω̃ ∈ [−3√2g, 3√2g].
pub fn default_grid(p: &PhysicalParams) -> Vec<f64> {
    symmetric_grid(3.0 * std::f64::consts::SQRT_2 * p.g, DEFAULT_SWEEP_POINTS)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Domain("sweep grid is empty".into()));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("sweep grid contains non-finite values".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("sweep grid must be strictly increasing".into()));
    }
    Ok(())
}

fn run_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Per-point evaluation of both paths; failures carry the grid index.
fn evaluate<F>(grid: &[f64], threads: Option<usize>, f: F) -> Result<(Vec<f64>, Vec<f64>)>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    let results: Vec<Result<(f64, f64)>> = run_pool(threads, || grid.par_iter().map(|&x| f(x)).collect())?;
    let mut failures = Vec::new();
    let (mut a, mut b) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((x, y)) => {
                a.push(x);
                b.push(y);
            }
            Err(e) => failures.push((i, Box::new(e))),
        }
    }
    if !failures.is_empty() {
        return Err(Error::SweepFailed { failures });
    }
    Ok((a, b))
}

/// n̄±(Ω̃) over `grid` by the requested paths, with peaks annotated.
pub fn sweep(p: &PhysicalParams, grid: &[f64], method: Method, opts: &SweepOptions) -> Result<SweepResult> {
    p.validate()?;
    check_grid(grid)?;
    let mut out = SweepResult {
        grid: grid.to_vec(),
        n_plus_analytic: None,
        n_minus_analytic: None,
        n_plus_numeric: None,
        n_minus_numeric: None,
        method,
        peaks: Vec::new(),
    };
    if method.analytic() {
        let (a, b) = evaluate(grid, None, |x| n_weak_drive(&p.with_drive_detuning(x)))?;
        out.n_plus_analytic = Some(a);
        out.n_minus_analytic = Some(b);
    }
    if method.numeric() {
        let ops = CompositeOps::new(&opts.hilbert)?;
        let (a, b) = evaluate(grid, opts.threads, |x| steady_photon_numbers(&p.with_drive_detuning(x), &ops))?;
        out.n_plus_numeric = Some(a);
        out.n_minus_numeric = Some(b);
    }
    out.peaks = find_peaks(&out);
    Ok(out)
}

/// Interior local maxima with three-point parabolic refinement, sorted by
/// position. Returns (index, refined position, refined height).
pub fn local_maxima(x: &[f64], y: &[f64]) -> Vec<(usize, f64, f64)> {
    let mut out = Vec::new();
    if x.len() < 3 || x.len() != y.len() {
        return out;
    }
    for i in 1..x.len() - 1 {
        if y[i] > y[i - 1] && y[i] >= y[i + 1] {
            let (pos, h) = parabola_vertex([x[i - 1], x[i], x[i + 1]], [y[i - 1], y[i], y[i + 1]]);
            out.push((i, pos, h));
        }
    }
    out
}

/// Vertex of the parabola through three points; falls back to the middle
/// point when the points are collinear.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let (x0, x1, x2) = (x[0] - x[1], 0.0, x[2] - x[1]);
    let d0 = (y[0] - y[1]) / (x0 - x1);
    let d2 = (y[2] - y[1]) / (x2 - x1);
    let a = (d2 - d0) / (x2 - x0);
    if !(a < 0.0) {
        return (x[1], y[1]);
    }
    let b = d0 - a * x0;
    let t = -b / (2.0 * a);
    (x[1] + t, y[1] + b * t + a * t * t)
}

/// Index of the grid point closest to `x`.
pub fn nearest_index(grid: &[f64], x: f64) -> usize {
    grid.iter()
        .enumerate()
        .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
        .map_or(0, |(i, _)| i)
}

/// Peaks of every series present in the sweep.
pub fn find_peaks(s: &SweepResult) -> Vec<Peak> {
    let mut out = Vec::new();
    for path in [Path::Analytic, Path::Numeric] {
        for mode in [Mode::Plus, Mode::Minus] {
            if let Some(y) = s.series(mode, path) {
                for (index, position, height) in local_maxima(&s.grid, y) {
                    out.push(Peak { position, height, index, grid_position: s.grid[index], mode, path });
                }
            }
        }
    }
    out
}

/// Warnings about peak detection: too few peaks (overdamped spectra merge
/// them) or a grid too coarse to resolve the linewidth.
pub fn peak_warnings(s: &SweepResult, gamma: f64, expected: usize) -> Vec<String> {
    let mut w = Vec::new();
    if let Some(step) = s.grid.windows(2).map(|p| p[1] - p[0]).reduce(f64::max) {
        if step > 0.25 * gamma {
            w.push(format!("grid step {step:e} exceeds γ/4; peaks may be missed"));
        }
    }
    for path in [Path::Analytic, Path::Numeric] {
        for mode in [Mode::Plus, Mode::Minus] {
            if s.series(mode, path).is_some() {
                let n = s.peaks_of(mode, path).len();
                if n < expected {
                    w.push(format!("{mode:?}/{path:?}: found {n} peak(s), expected {expected}"));
                }
            }
        }
    }
    w
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityCurve {
    pub probe: f64,
    pub delta_grid: Vec<f64>,
    pub heights: Vec<f64>,
    pub fitted_slope: f64,
    pub intercept: f64,
    /// RMS residual of the linear fit.
    pub fit_residual: f64,
    /// Δ range actually used by the fit.
    pub fit_window: (f64, f64),
    pub closed_form_slope: f64,
    /// |fitted − closed form| / |closed form| (0 when both vanish).
    pub relative_difference: f64,
    /// Whether the fit window respects |Δ/Ω_a| < 1e-5.
    pub window_in_linear_regime: bool,
}

/// Points used by the least-squares slope.
pub const SLOPE_FIT_POINTS: usize = 11;

/// 21 points over Δ ∈ [−2e-6, 2e-6]·Ω_a, so the fit spans ±1e-6·Ω_a.
pub fn default_delta_grid(p: &PhysicalParams) -> Vec<f64> {
    symmetric_grid(2e-6 * p.omega_atom.abs(), 21)
}

/// Ordinary least squares y = a + b·x. Returns (b, a, rms residual).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = my - b * mx;
    let rss: f64 = x.iter().zip(y).map(|(u, v)| (v - a - b * u).powi(2)).sum();
    (b, a, (rss / n).sqrt())
}

fn build_curve(p: &PhysicalParams, delta_grid: &[f64], heights: Vec<f64>) -> Result<SensitivityCurve> {
    let n = delta_grid.len();
    let take = SLOPE_FIT_POINTS.min(n);
    let start = (n - take) / 2;
    let (xs, ys) = (&delta_grid[start..start + take], &heights[start..start + take]);
    let (slope, intercept, resid) = linear_fit(xs, ys);
    let closed = slope_closed_form(p)?;
    let rel = if closed == 0.0 && slope == 0.0 {
        0.0
    } else {
        (slope - closed).abs() / closed.abs().max(f64::MIN_POSITIVE)
    };
    let window = (xs[0], xs[take - 1]);
    let limit = 1e-5 * p.omega_atom.abs();
    Ok(SensitivityCurve {
        probe: std::f64::consts::SQRT_2 * p.g,
        delta_grid: delta_grid.to_vec(),
        heights,
        fitted_slope: slope,
        intercept,
        fit_residual: resid,
        fit_window: window,
        closed_form_slope: closed,
        relative_difference: rel,
        window_in_linear_regime: window.0.abs() < limit && window.1.abs() < limit,
    })
}

/// Weak-drive n̄₊ at the fixed probe Ω̃ = √2g as a function of Δ, with a
/// least-squares slope over the central points of `delta_grid`.
pub fn sensitivity_curve(p: &PhysicalParams, delta_grid: &[f64]) -> Result<SensitivityCurve> {
    p.validate()?;
    p.require_resonant("the sensitivity curve")?;
    check_grid(delta_grid)?;
    let probe = std::f64::consts::SQRT_2 * p.g;
    let heights = delta_grid
        .iter()
        .map(|&d| n_weak_drive(&p.with_delta(d).with_drive_detuning(probe)).map(|r| r.0))
        .collect::<Result<Vec<_>>>()?;
    build_curve(p, delta_grid, heights)
}

/// Same protocol with heights from the Lindblad steady state.
pub fn sensitivity_curve_numeric(p: &PhysicalParams, delta_grid: &[f64], opts: &SweepOptions) -> Result<SensitivityCurve> {
    p.validate()?;
    p.require_resonant("the sensitivity curve")?;
    check_grid(delta_grid)?;
    let probe = std::f64::consts::SQRT_2 * p.g;
    let ops = CompositeOps::new(&opts.hilbert)?;
    let (heights, _) = evaluate(delta_grid, opts.threads, |d| {
        steady_photon_numbers(&p.with_delta(d).with_drive_detuning(probe), &ops)
    })?;
    build_curve(p, delta_grid, heights)
}

/// Largest relative gap between two series and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathGap {
    pub max_relative_error: f64,
    pub worst_index: usize,
    pub worst_position: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub plus: PathGap,
    pub minus: PathGap,
    /// ℰ > γ/5: the moment closure is outside its weak-drive regime.
    pub closure_breakdown: bool,
}

impl CompareReport {
    pub fn max_relative_error(&self) -> f64 {
        self.plus.max_relative_error.max(self.minus.max_relative_error)
    }
}

/// Denominator floor of the relative error.
pub const COMPARE_FLOOR: f64 = 1e-12;

pub fn relative_gap(grid: &[f64], numeric: &[f64], analytic: &[f64]) -> PathGap {
    let mut gap = PathGap { max_relative_error: 0.0, worst_index: 0, worst_position: grid.first().copied().unwrap_or(0.0) };
    for (i, (n, a)) in numeric.iter().zip(analytic).enumerate() {
        let e = (n - a).abs() / a.max(COMPARE_FLOOR);
        if e > gap.max_relative_error {
            gap = PathGap { max_relative_error: e, worst_index: i, worst_position: grid[i] };
        }
    }
    gap
}

/// Compares a sweep that carries both paths.
pub fn compare_sweep(s: &SweepResult, p: &PhysicalParams) -> Result<CompareReport> {
    let get = |m, path| {
        s.series(m, path)
            .ok_or_else(|| Error::Unsupported("comparison needs a sweep with both methods".into()))
    };
    Ok(CompareReport {
        plus: relative_gap(&s.grid, get(Mode::Plus, Path::Numeric)?, get(Mode::Plus, Path::Analytic)?),
        minus: relative_gap(&s.grid, get(Mode::Minus, Path::Numeric)?, get(Mode::Minus, Path::Analytic)?),
        closure_breakdown: p.drive_amp > 0.2 * p.gamma,
    })
}

/// max |n̄_numeric − n̄_analytic| / max(n̄_analytic, 1e-12) per mode.
pub fn compare_paths(p: &PhysicalParams, grid: &[f64], opts: &SweepOptions) -> Result<CompareReport> {
    let s = sweep(p, grid, Method::Both, opts)?;
    compare_sweep(&s, p)
}

/// Largest |y(x) − y(−x)| over a symmetric grid, relative to max |y|.
pub fn symmetry_defect(grid: &[f64], y: &[f64]) -> f64 {
    let n = grid.len();
    let top = y.iter().cloned().fold(0.0, f64::max);
    let mut worst = 0.0_f64;
    for i in 0..n {
        debug_assert_eq!(grid[i], -grid[n - 1 - i]);
        worst = worst.max((y[i] - y[n - 1 - i]).abs());
    }
    if top > 0.0 {
        worst / top
    } else {
        worst
    }
}

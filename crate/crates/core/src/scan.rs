//! Sweeps over alpha, v0 and the mass ratio built on the spectrum solver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::faddeev::{find_spectrum, odd_root_count, MassConfig, MomentumGrid, SpectrumSettings};
use crate::twobody::{self, alpha_critical, PotentialParams, StateKind, TwoBodyState};

/// Relative offset above alpha_c used for "just above the threshold line".
pub const DEFAULT_ALPHA_OFFSET: f64 = 1e-3;
pub const DEFAULT_ALPHA_TOL: f64 = 1e-4;
pub const MIN_FIT_POINTS: usize = 8;
pub const DEFAULT_FIT_FRACTION: f64 = 0.1;
pub const MAX_FIT_RESIDUAL: f64 = 0.05;
/// Jumps larger than this many local slopes are flagged.
pub const CONTINUITY_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveRow {
    pub alpha: f64,
    /// Sorted ascending; index is the state label.
    pub energies: Vec<f64>,
    /// Bound state when one exists, otherwise the virtual state.
    pub two_body: Option<TwoBodyState>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurveFlag {
    /// More states at `alpha[index + 1]` than at `alpha[index]`.
    CountIncrease { index: usize },
    /// Level `level` jumps between `alpha[index]` and `alpha[index + 1]`.
    Discontinuity { level: usize, index: usize },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumCurve {
    pub v0: f64,
    pub mass_ratio: f64,
    pub rows: Vec<CurveRow>,
    pub flags: Vec<CurveFlag>,
}

impl SpectrumCurve {
    /// `(alpha, E_level)` for every row where the level exists.
    pub fn level(&self, level: usize) -> Vec<(f64, f64)> {
        self.rows
            .iter()
            .filter_map(|r| r.energies.get(level).map(|&e| (r.alpha, e)))
            .collect()
    }
}

fn two_body_reference(params: PotentialParams, tol: f64) -> Result<Option<TwoBodyState>> {
    let states = twobody::solve_two_body(params, tol)?;
    let bound = states
        .iter()
        .filter(|s| s.kind == StateKind::Bound)
        .min_by(|a, b| a.energy.partial_cmp(&b.energy).unwrap());
    Ok(bound.or_else(|| states.first()).copied())
}

/// Indices `j` where `|y[j+1] - y[j]|` exceeds `factor` times the slope of
/// the neighbouring intervals.
pub fn continuity_violations(x: &[f64], y: &[f64], factor: f64) -> Vec<usize> {
    let n = x.len().min(y.len());
    if n < 3 {
        return Vec::new();
    }
    let slope: Vec<f64> = (0..n - 1)
        .map(|j| ((y[j + 1] - y[j]) / (x[j + 1] - x[j])).abs())
        .collect();
    (0..n - 1)
        .filter(|&j| {
            let before = if j > 0 { slope[j - 1] } else { 0.0 };
            let after = slope.get(j + 1).copied().unwrap_or(0.0);
            slope[j] > factor * before.max(after)
        })
        .collect()
}

fn curve_flags(rows: &[CurveRow]) -> Vec<CurveFlag> {
    let mut flags = Vec::new();
    let ok: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].error.is_none()).collect();
    for w in ok.windows(2) {
        if rows[w[1]].energies.len() > rows[w[0]].energies.len() {
            flags.push(CurveFlag::CountIncrease { index: w[0] });
        }
    }
    let levels = rows.iter().map(|r| r.energies.len()).max().unwrap_or(0);
    for level in 0..levels {
        let idx: Vec<usize> = ok
            .iter()
            .copied()
            .filter(|&i| rows[i].energies.len() > level)
            .collect();
        let x: Vec<f64> = idx.iter().map(|&i| rows[i].alpha).collect();
        let y: Vec<f64> = idx.iter().map(|&i| rows[i].energies[level]).collect();
        for j in continuity_violations(&x, &y, CONTINUITY_FACTOR) {
            flags.push(CurveFlag::Discontinuity { level, index: idx[j] });
        }
    }
    flags
}

/// Three-body spectrum at each alpha. Failures are kept in the row.
pub fn spectrum_curve(
    v0: f64,
    masses: MassConfig,
    alpha_samples: &[f64],
    grid: &MomentumGrid,
    settings: &SpectrumSettings,
) -> Result<SpectrumCurve> {
    if alpha_samples.windows(2).any(|w| !(w[0] < w[1])) {
        return domain("alpha samples must be strictly increasing");
    }
    let rows: Vec<CurveRow> = alpha_samples
        .par_iter()
        .map(|&alpha| {
            let run = || -> Result<(Vec<f64>, Option<TwoBodyState>)> {
                let params = PotentialParams::new(v0, alpha)?;
                let spectrum = find_spectrum(params, masses, grid, settings)?;
                Ok((spectrum.energies(), two_body_reference(params, settings.two_body_tol)?))
            };
            match run() {
                Ok((energies, two_body)) => CurveRow { alpha, energies, two_body, error: None },
                Err(e) => CurveRow {
                    alpha,
                    energies: Vec::new(),
                    two_body: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let flags = curve_flags(&rows);
    Ok(SpectrumCurve { v0, mass_ratio: masses.mass_ratio(), rows, flags })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowSettings {
    /// Relative offset above alpha_c where a state must exist.
    pub alpha_offset: f64,
    /// Absolute bisection tolerance on alpha_w.
    pub alpha_tol: f64,
    pub max_expansions: usize,
}

impl Default for WindowSettings {
    fn default() -> Self {
        WindowSettings {
            alpha_offset: DEFAULT_ALPHA_OFFSET,
            alpha_tol: DEFAULT_ALPHA_TOL,
            max_expansions: 12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRecord {
    pub v0: f64,
    pub alpha_c: f64,
    pub alpha_w: f64,
    pub mass_ratio: f64,
}

impl WindowRecord {
    pub fn width(&self) -> f64 {
        self.alpha_w - self.alpha_c
    }
}

/// Existence test for "at least one state below the scan top".
struct Probe<'a> {
    v0: f64,
    masses: MassConfig,
    grid: &'a MomentumGrid,
    settings: &'a SpectrumSettings,
    // at most one state anywhere above the starting alpha, so parity decides
    parity_exact: bool,
}

impl Probe<'_> {
    fn has_state(&self, alpha: f64) -> Result<bool> {
        let params = PotentialParams::new(self.v0, alpha)?;
        if self.parity_exact {
            odd_root_count(params, self.masses, self.grid, self.settings)
        } else {
            Ok(!find_spectrum(params, self.masses, self.grid, self.settings)?.states.is_empty())
        }
    }
}

/// Bisects on the existence of a three-body state for the alpha where the
/// last one dissociates.
pub fn find_alpha_w(
    v0: f64,
    masses: MassConfig,
    grid: &MomentumGrid,
    bracket_hint: Option<(f64, f64)>,
    settings: &SpectrumSettings,
    window: &WindowSettings,
) -> Result<f64> {
    if !(v0 > 0.0 && v0 < 0.5) {
        return domain(format!("window search needs 0 < v0 < 1/2, got {v0}"));
    }
    if !(window.alpha_tol > 0.0) {
        return domain("alpha tolerance must be positive");
    }
    let alpha_c = alpha_critical(v0)?;
    let start = alpha_c * (1.0 + window.alpha_offset);
    let base = find_spectrum(PotentialParams::new(v0, start)?, masses, grid, settings)?;
    if base.states.is_empty() {
        return Err(Error::NoBorromeanState { alpha_c });
    }
    let probe = Probe { v0, masses, grid, settings, parity_exact: base.states.len() == 1 };

    let (mut lo, mut hi) = bracket_hint.unwrap_or((start, start + 0.25 * alpha_c));
    if !(lo > start) || !probe.has_state(lo)? {
        lo = start;
    }
    if !(hi > lo) {
        hi = lo + 0.25 * alpha_c;
    }
    let mut expansions = 0;
    while probe.has_state(hi)? {
        if expansions == window.max_expansions {
            return Err(Error::Convergence {
                message: "three-body state persists at every alpha tried".into(),
                lo,
                hi,
            });
        }
        let width = hi - lo;
        lo = hi;
        hi += 2.0 * width;
        expansions += 1;
    }
    while hi - lo > window.alpha_tol {
        let mid = 0.5 * (lo + hi);
        if probe.has_state(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowGap {
    pub v0: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowMap {
    /// One record per v0 with a window, in input order.
    pub records: Vec<WindowRecord>,
    /// Samples without a Borromean state.
    pub absent: Vec<f64>,
    /// Samples where the solver failed.
    pub gaps: Vec<WindowGap>,
}

impl WindowMap {
    /// `(v0, alpha_c)` and `(v0, alpha_w)` boundary lines.
    pub fn boundaries(&self) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
        (
            self.records.iter().map(|r| (r.v0, r.alpha_c)).collect(),
            self.records.iter().map(|r| (r.v0, r.alpha_w)).collect(),
        )
    }
}

pub fn map_borromean_window(
    v0_samples: &[f64],
    masses: MassConfig,
    grid: &MomentumGrid,
    settings: &SpectrumSettings,
    window: &WindowSettings,
) -> WindowMap {
    let results: Vec<(f64, Result<f64>)> = v0_samples
        .par_iter()
        .map(|&v0| (v0, find_alpha_w(v0, masses, grid, None, settings, window)))
        .collect();
    let mut map = WindowMap { records: Vec::new(), absent: Vec::new(), gaps: Vec::new() };
    for (v0, r) in results {
        match r {
            Ok(alpha_w) => map.records.push(WindowRecord {
                v0,
                alpha_c: alpha_critical(v0).expect("validated by find_alpha_w"),
                alpha_w,
                mass_ratio: masses.mass_ratio(),
            }),
            Err(Error::NoBorromeanState { .. }) => map.absent.push(v0),
            Err(e) => map.gaps.push(WindowGap { v0, reason: e.to_string() }),
        }
    }
    map
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// `|E| = amplitude * |pivot - alpha|^exponent`.
    pub amplitude: f64,
    pub exponent: f64,
    pub pivot: f64,
    /// Distances to the pivot covered by the fit.
    pub fit_window: [f64; 2],
    /// Largest relative deviation of the fit inside the window.
    pub residual: f64,
    pub points: usize,
}

impl PowerLawFit {
    pub fn eval(&self, alpha: f64) -> f64 {
        -self.amplitude * (self.pivot - alpha).abs().powf(self.exponent)
    }

    pub fn acceptable(&self) -> bool {
        self.residual < MAX_FIT_RESIDUAL
    }
}

/// Log-log least squares of `|E|` against `|pivot - alpha|` over the points
/// whose distance is within `window_fraction` of the farthest one.
pub fn fit_power_law(points: &[(f64, f64)], pivot: f64, window_fraction: f64) -> Result<PowerLawFit> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return domain(format!("window fraction must lie in (0, 1], got {window_fraction}"));
    }
    let far = points.iter().map(|p| (pivot - p.0).abs()).fold(0.0, f64::max);
    let cut = window_fraction * far;
    let inside: Vec<(f64, f64)> = points
        .iter()
        .map(|&(a, e)| ((pivot - a).abs(), e))
        .filter(|&(d, _)| d > 0.0 && d <= cut)
        .collect();
    if inside.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints { needed: MIN_FIT_POINTS, found: inside.len() });
    }
    if let Some(&(_, e)) = inside.iter().find(|&&(_, e)| !(e < 0.0)) {
        return domain(format!("power-law fit needs negative energies, got {e}"));
    }
    let n = inside.len() as f64;
    let xs: Vec<f64> = inside.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = inside.iter().map(|p| (-p.1).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return domain("all fit points sit at the same distance from the pivot");
    }
    let exponent = sxy / sxx;
    let amplitude = (my - exponent * mx).exp();
    let residual = inside
        .iter()
        .map(|&(d, e)| ((amplitude * d.powf(exponent) + e) / e).abs())
        .fold(0.0, f64::max);
    let lo = inside.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = inside.iter().map(|p| p.0).fold(0.0, f64::max);
    Ok(PowerLawFit {
        amplitude,
        exponent,
        pivot,
        fit_window: [lo, hi],
        residual,
        points: inside.len(),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MassRow {
    pub mass_ratio: f64,
    pub alpha: f64,
    pub energies: Vec<f64>,
    pub error: Option<String>,
}

impl MassRow {
    pub fn count(&self) -> usize {
        self.energies.len()
    }
}

/// Spectrum at `alpha_c (1 + alpha_offset)` for each mass ratio.
pub fn mass_ratio_sweep(
    v0: f64,
    alpha_offset: f64,
    mass_samples: &[f64],
    grid: &MomentumGrid,
    settings: &SpectrumSettings,
) -> Result<Vec<MassRow>> {
    if !(alpha_offset > 0.0) {
        return domain("alpha offset must be positive to stay above alpha_c");
    }
    let alpha = alpha_critical(v0)? * (1.0 + alpha_offset);
    let params = PotentialParams::new(v0, alpha)?;
    Ok(mass_samples
        .par_iter()
        .map(|&mass_ratio| {
            let run = || -> Result<Vec<f64>> {
                let masses = MassConfig::new(mass_ratio)?;
                Ok(find_spectrum(params, masses, grid, settings)?.energies())
            };
            match run() {
                Ok(energies) => MassRow { mass_ratio, alpha, energies, error: None },
                Err(e) => MassRow { mass_ratio, alpha, energies: Vec::new(), error: Some(e.to_string()) },
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_quadratic() {
        let pts: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let a = 1.0 + 0.02 * i as f64;
                (a, -3.0 * (2.0 - a).powi(2))
            })
            .collect();
        let f = fit_power_law(&pts, 2.0, 0.5).unwrap();
        assert!((f.amplitude - 3.0).abs() < 1e-12, "{f:?}");
        assert!((f.exponent - 2.0).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn fit_needs_points() {
        let pts = [(0.0, -1.0), (0.5, -0.5), (0.9, -0.1)];
        assert!(matches!(
            fit_power_law(&pts, 1.0, 1.0),
            Err(Error::InsufficientPoints { needed: 8, found: 3 })
        ));
    }

    #[test]
    fn jump_is_flagged() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let mut y: Vec<f64> = x.iter().map(|v| -1.0 - 0.1 * v).collect();
        assert!(continuity_violations(&x, &y, 3.0).is_empty());
        for v in &mut y[6..] {
            *v -= 5.0;
        }
        assert_eq!(continuity_violations(&x, &y, 3.0), vec![5]);
    }
}

use std::path::{Path, PathBuf};

use borromean_core::faddeev::{ExchangeSign, SpectrumSettings, DEFAULT_TWO_BODY_TOL};
use borromean_core::scan::{WindowSettings, DEFAULT_ALPHA_OFFSET, DEFAULT_ALPHA_TOL};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    pub n_points: usize,
    pub map_scale: f64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { n_points: 200, map_scale: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Solver {
    pub search_floor: Option<f64>,
    pub samples_per_decade: usize,
    pub refine_factor: usize,
    pub refine_window: f64,
    pub edge_epsilon: f64,
    pub ir_guard_factor: f64,
    pub energy_rtol: f64,
    pub residual_tol: f64,
    pub two_body_tol: f64,
}

impl Default for Solver {
    fn default() -> Self {
        let s = SpectrumSettings::default();
        Solver {
            search_floor: s.search_floor,
            samples_per_decade: s.samples_per_decade,
            refine_factor: s.refine_factor,
            refine_window: s.refine_window,
            edge_epsilon: s.edge_epsilon,
            ir_guard_factor: s.ir_guard_factor,
            energy_rtol: s.energy_rtol,
            residual_tol: s.residual_tol,
            two_body_tol: s.two_body_tol,
        }
    }
}

impl Solver {
    pub fn settings(&self) -> SpectrumSettings {
        SpectrumSettings {
            exchange_sign: ExchangeSign::Boson,
            search_floor: self.search_floor,
            samples_per_decade: self.samples_per_decade,
            refine_factor: self.refine_factor,
            refine_window: self.refine_window,
            edge_epsilon: self.edge_epsilon,
            ir_guard_factor: self.ir_guard_factor,
            energy_rtol: self.energy_rtol,
            residual_tol: self.residual_tol,
            two_body_tol: self.two_body_tol,
        }
    }
}

/// Inclusive linear range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Range {
    pub fn samples(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        (0..self.steps)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub format: Format,
    /// Table destination; standard output when absent.
    pub out: Option<PathBuf>,
}

impl Default for Output {
    fn default() -> Self {
        Output { format: Format::Csv, out: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TwoBodyConfig {
    pub v0: f64,
    pub alpha: f64,
    pub tol: f64,
    pub output: Output,
}

impl Default for TwoBodyConfig {
    fn default() -> Self {
        TwoBodyConfig { v0: 0.32, alpha: 0.0, tol: DEFAULT_TWO_BODY_TOL, output: Output::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub v0: f64,
    pub alpha: f64,
    pub mass_ratio: f64,
    pub grid: Grid,
    pub solver: Solver,
    pub output: Output,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            v0: 0.32,
            alpha: 0.0,
            mass_ratio: 22.2,
            grid: Grid::default(),
            solver: Solver::default(),
            output: Output::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CurveConfig {
    pub v0: f64,
    pub mass_ratio: f64,
    pub alpha: Range,
    pub grid: Grid,
    pub solver: Solver,
    pub output: Output,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            v0: 0.32,
            mass_ratio: 22.2,
            alpha: Range { min: 0.0, max: 4.0, steps: 21 },
            grid: Grid::default(),
            solver: Solver::default(),
            output: Output::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WavefunctionConfig {
    pub v0: f64,
    pub alpha: f64,
    pub mass_ratio: f64,
    /// Index of the bound state, ground state first.
    pub state: usize,
    /// Momentum half-width; chosen from the binding energy when absent.
    pub window: Option<f64>,
    /// Multiplier on the automatic position spans.
    pub span_scale: f64,
    /// Zero-padding factor of the transform.
    pub resolution: usize,
    /// Position-space grid dump with a JSON sidecar.
    pub dump: Option<PathBuf>,
    pub grid: Grid,
    pub solver: Solver,
    pub output: Output,
}

impl Default for WavefunctionConfig {
    fn default() -> Self {
        WavefunctionConfig {
            v0: 0.32,
            alpha: 0.0,
            mass_ratio: 22.2,
            state: 0,
            window: None,
            span_scale: 1.0,
            resolution: 1,
            dump: None,
            grid: Grid { n_points: 150, map_scale: 1.0 },
            solver: Solver::default(),
            output: Output { format: Format::Json, out: None },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WindowConfig {
    pub v0: Range,
    pub mass_ratio: f64,
    pub alpha_offset: f64,
    pub alpha_tol: f64,
    pub grid: Grid,
    pub solver: Solver,
    pub output: Output,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            v0: Range { min: 0.32, max: 0.32, steps: 1 },
            mass_ratio: 22.2,
            alpha_offset: DEFAULT_ALPHA_OFFSET,
            alpha_tol: DEFAULT_ALPHA_TOL,
            grid: Grid { n_points: 300, map_scale: 0.15 },
            solver: Solver::default(),
            output: Output::default(),
        }
    }
}

impl WindowConfig {
    pub fn window_settings(&self) -> WindowSettings {
        WindowSettings { alpha_offset: self.alpha_offset, alpha_tol: self.alpha_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MassSweepConfig {
    pub v0: f64,
    pub mass_ratios: Vec<f64>,
    pub alpha_offset: f64,
    pub grid: Grid,
    pub solver: Solver,
    pub output: Output,
}

impl Default for MassSweepConfig {
    fn default() -> Self {
        MassSweepConfig {
            v0: 0.32,
            mass_ratios: vec![0.2, 1.0, 22.2, 100.0, 720.0],
            alpha_offset: DEFAULT_ALPHA_OFFSET,
            grid: Grid { n_points: 300, map_scale: 1.0 },
            solver: Solver::default(),
            output: Output::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Twobody(TwoBodyConfig),
    Spectrum(SpectrumConfig),
    Curve(CurveConfig),
    Wavefunction(WavefunctionConfig),
    Window(WindowConfig),
    MassSweep(MassSweepConfig),
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Twobody(_) => "twobody",
            RunConfig::Spectrum(_) => "spectrum",
            RunConfig::Curve(_) => "curve",
            RunConfig::Wavefunction(_) => "wavefunction",
            RunConfig::Window(_) => "window",
            RunConfig::MassSweep(_) => "mass-sweep",
        }
    }

    pub fn output(&self) -> &Output {
        match self {
            RunConfig::Twobody(c) => &c.output,
            RunConfig::Spectrum(c) => &c.output,
            RunConfig::Curve(c) => &c.output,
            RunConfig::Wavefunction(c) => &c.output,
            RunConfig::Window(c) => &c.output,
            RunConfig::MassSweep(c) => &c.output,
        }
    }

    /// SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn load(path: &Path) -> Result<RunConfig, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), UsageError> {
        let grid = |g: &Grid| {
            if g.n_points < 8 || g.n_points % 2 != 0 {
                return Err(UsageError(format!("n-points must be even and at least 8, got {}", g.n_points)));
            }
            if !(g.map_scale > 0.0 && g.map_scale.is_finite()) {
                return Err(UsageError(format!("map-scale must be positive, got {}", g.map_scale)));
            }
            Ok(())
        };
        let range = |name: &str, r: &Range| {
            if r.steps == 0 || !(r.min <= r.max) {
                return Err(UsageError(format!("{name} range needs min <= max and steps >= 1")));
            }
            if r.steps > 1 && r.min == r.max {
                return Err(UsageError(format!("{name} range with several steps needs min < max")));
            }
            Ok(())
        };
        match self {
            RunConfig::Twobody(c) => {
                if !(c.tol > 0.0) {
                    return Err(UsageError("tol must be positive".into()));
                }
            }
            RunConfig::Spectrum(c) => grid(&c.grid)?,
            RunConfig::Curve(c) => {
                grid(&c.grid)?;
                range("alpha", &c.alpha)?;
            }
            RunConfig::Wavefunction(c) => {
                grid(&c.grid)?;
                if c.resolution == 0 {
                    return Err(UsageError("resolution must be at least 1".into()));
                }
                if !(c.span_scale > 0.0) {
                    return Err(UsageError("span-scale must be positive".into()));
                }
            }
            RunConfig::Window(c) => {
                grid(&c.grid)?;
                range("v0", &c.v0)?;
            }
            RunConfig::MassSweep(c) => {
                grid(&c.grid)?;
                if c.mass_ratios.is_empty() {
                    return Err(UsageError("at least one mass ratio is required".into()));
                }
            }
        }
        Ok(())
    }
}

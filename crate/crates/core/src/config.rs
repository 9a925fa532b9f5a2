//! Run configuration shared by every command.
//!
//! Units: lengths and times are nondimensional; `grid.length` is the interval
//! length `L`, `time.t_end`, `time.dt_max` and `time.snapshot_every` are in the
//! time unit of the rate constants.

use serde::{Deserialize, Serialize};

use crate::analysis::{GrowthWindow, ReportOptions};
use crate::convergence::ErrorNorm;
use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::pde::{Controls, Grid1D, InitialSpec, Perturbation};

pub const SCHEMA_VERSION: u32 = 1;

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub model: ModelSpec,
    /// Needed by `simulate` and `sweep`; `threshold` uses its length for the discrete verdict.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Grid1D>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeConfig>,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub dispersion: DispersionConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeConfig {
    pub t_end: f64,
    #[serde(flatten)]
    pub controls: Controls,
}

fn default_steady_window() -> f64 {
    100.0
}
fn default_steady_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Mode whose growth is fitted; defaults to the mode of a cosine perturbation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_mode: Option<usize>,
    /// Lower amplitude bound of the fit window; defaults to `10 a0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_lo: Option<f64>,
    /// Upper amplitude bound; defaults to `0.05 u*`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window_hi: Option<f64>,
    #[serde(default = "default_steady_window")]
    pub steady_window: f64,
    #[serde(default = "default_steady_tol")]
    pub steady_tol: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            fit_mode: None,
            window_lo: None,
            window_hi: None,
            steady_window: default_steady_window(),
            steady_tol: default_steady_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepConfig {
    #[serde(default)]
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub d12: Vec<f64>,
    #[serde(default)]
    pub norm: ErrorNorm,
}

fn default_points() -> usize {
    401
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionConfig {
    /// Upper end of the sampled `λ` range; defaults to twice the band end (or 1 without a band).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            lambda_max: None,
            points: default_points(),
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {x}")))
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::invalid("config", e.to_string()))?;
        // a run manifest embeds the config under "config"
        let value = match value {
            serde_json::Value::Object(mut m) if m.contains_key("config") && !m.contains_key("model") => m.remove("config").unwrap(),
            v => v,
        };
        let cfg: RunConfig = serde_json::from_value(value).map_err(|e| Error::invalid("config", e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        self.model.validate()?;
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        if let Some(t) = &self.time {
            positive("time.t_end", t.t_end)?;
            t.controls.validate()?;
        }
        self.initial.validate()?;
        self.sweep.validate()?;
        let a = &self.analysis;
        positive("analysis.steady_window", a.steady_window)?;
        positive("analysis.steady_tol", a.steady_tol)?;
        for (name, b) in [("analysis.window_lo", a.window_lo), ("analysis.window_hi", a.window_hi)] {
            if let Some(b) = b {
                positive(name, b)?;
            }
        }
        if let (Some(lo), Some(hi)) = (a.window_lo, a.window_hi) {
            if lo >= hi {
                return Err(Error::invalid("analysis.window_lo", format!("must be below window_hi, got {lo} >= {hi}")));
            }
        }
        if let Some(l) = self.dispersion.lambda_max {
            positive("dispersion.lambda_max", l)?;
        }
        if self.dispersion.points < 2 {
            return Err(Error::invalid("dispersion.points", "need at least 2"));
        }
        Ok(())
    }

    pub fn require_grid(&self) -> Result<Grid1D> {
        self.grid.ok_or_else(|| Error::invalid("grid", "this command needs a grid"))
    }

    pub fn require_time(&self) -> Result<TimeConfig> {
        self.time.ok_or_else(|| Error::invalid("time", "this command needs time controls"))
    }

    /// Post-processing options for a run whose base state has first component `u0`.
    pub fn report_options(&self, u0: f64) -> ReportOptions {
        let a = &self.analysis;
        let (cos_mode, a0) = match self.initial.perturbation {
            Perturbation::Cosine { mode, amplitude_rel } => (Some(mode), amplitude_rel * u0),
            Perturbation::Noise { amplitude_rel } => (None, amplitude_rel * u0),
            Perturbation::None => (None, 0.0),
        };
        let fit_mode = a.fit_mode.or(cos_mode).filter(|&m| m > 0);
        let default = GrowthWindow::linear_regime(a0, u0);
        let window = GrowthWindow {
            lo: a.window_lo.unwrap_or(default.lo),
            hi: a.window_hi.unwrap_or(default.hi),
        };
        ReportOptions {
            fit_mode,
            window: Some(window),
            steady_window: a.steady_window,
            steady_tol: a.steady_tol,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        validate_epsilons(&self.epsilons)?;
        if let Some(d) = self.d12.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            return Err(Error::invalid("sweep.d12", format!("values must be finite and >= 0, got {d}")));
        }
        Ok(())
    }
}

/// Positive, finite and strictly decreasing (an empty list is accepted).
pub fn validate_epsilons(eps: &[f64]) -> Result<()> {
    if let Some(e) = eps.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::invalid("sweep.epsilons", format!("values must be finite and > 0, got {e}")));
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("sweep.epsilons", "values must be strictly decreasing"));
    }
    Ok(())
}

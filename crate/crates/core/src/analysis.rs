//! Post-processing of trajectories: Neumann mode content, growth fits and steady-state detection.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::Trajectory;
use crate::turing::neumann_eigenvalue;

/// Minimum number of snapshots a growth fit accepts.
pub const MIN_FIT_SAMPLES: usize = 10;

/// Projection of a cell-centred field on `cos(nπx/L)`, `n = 0..=N/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum {
    /// `c_0` is the mean; `c_n = (2/N) Σ w_i cos(nπ x_i / L)` for `n >= 1`.
    pub coeffs: Vec<f64>,
    /// `c_0²` and `c_n²/2`, so that the energies of `n >= 1` add up to the variance.
    pub energies: Vec<f64>,
}

impl ModeSpectrum {
    pub fn variance(&self) -> f64 {
        self.energies[1..].iter().sum()
    }

    /// Mode `n >= 1` with the most energy, or 0 for a constant field.
    pub fn dominant_mode(&self) -> usize {
        let var = self.variance();
        if !(var > 1e-300 && var > 1e-28 * self.energies[0]) {
            return 0;
        }
        (1..self.energies.len())
            .max_by(|&a, &b| self.energies[a].total_cmp(&self.energies[b]))
            .unwrap_or(0)
    }

    /// Fraction of the variance carried by the dominant mode (1 for a constant field).
    pub fn dominant_share(&self) -> f64 {
        match self.dominant_mode() {
            0 => 1.0,
            n => self.energies[n] / self.variance(),
        }
    }
}

pub fn cosine_modes(field: &[f64], length: f64) -> ModeSpectrum {
    let n_cells = field.len();
    let dx = length / n_cells as f64;
    let n_max = n_cells / 2;
    let mut coeffs = Vec::with_capacity(n_max + 1);
    coeffs.push(field.iter().sum::<f64>() / n_cells as f64);
    for n in 1..=n_max {
        coeffs.push(mode_coeff(field, n, dx, length));
    }
    let energies = coeffs.iter().enumerate().map(|(n, c)| if n == 0 { c * c } else { 0.5 * c * c }).collect();
    ModeSpectrum { coeffs, energies }
}

fn mode_coeff(field: &[f64], n: usize, dx: f64, length: f64) -> f64 {
    let k = n as f64 * PI / length;
    let s: f64 = field.iter().enumerate().map(|(i, w)| w * (k * (i as f64 + 0.5) * dx).cos()).sum();
    2.0 * s / field.len() as f64
}

/// `max - min` over the grid.
pub fn amplitude(field: &[f64]) -> f64 {
    let (lo, hi) = field
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

/// Amplitudes admitted to a growth fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthWindow {
    pub lo: f64,
    pub hi: f64,
}

impl GrowthWindow {
    /// `[10 a0, 0.05 u*]`: past the initial transient, before saturation.
    pub fn linear_regime(a0: f64, u_star: f64) -> Self {
        Self {
            lo: 10.0 * a0,
            hi: 0.05 * u_star,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub mode: usize,
    pub lambda: f64,
    pub rate: f64,
    /// Fitted `ln |c_n|` at `t = 0`.
    pub intercept: f64,
    pub samples: usize,
    pub t_start: f64,
    pub t_end: f64,
}

/// Least-squares slope of `ln a` against `t` over the first contiguous stretch of samples inside `window`.
pub fn fit_growth_series(times: &[f64], amps: &[f64], window: GrowthWindow) -> Result<(f64, f64, usize, f64, f64)> {
    let inside = |a: f64| a.is_finite() && a > 0.0 && a >= window.lo && a <= window.hi;
    let start = amps.iter().position(|&a| inside(a));
    let (t, a): (Vec<f64>, Vec<f64>) = match start {
        Some(s) => times[s..]
            .iter()
            .zip(&amps[s..])
            .take_while(|(_, &a)| inside(a))
            .map(|(&t, &a)| (t, a.ln()))
            .unzip(),
        None => (Vec::new(), Vec::new()),
    };
    if t.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientWindow {
            found: t.len(),
            required: MIN_FIT_SAMPLES,
        });
    }
    let m = t.len() as f64;
    let tm = t.iter().sum::<f64>() / m;
    let am = a.iter().sum::<f64>() / m;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (ti, ai) in t.iter().zip(&a) {
        sxy += (ti - tm) * (ai - am);
        sxx += (ti - tm) * (ti - tm);
    }
    let rate = sxy / sxx;
    Ok((rate, am - rate * tm, t.len(), t[0], t[t.len() - 1]))
}

/// Exponential rate of `|c_n|` of the first species.
pub fn fit_growth(traj: &Trajectory, mode: usize, window: GrowthWindow) -> Result<GrowthFit> {
    let amps: Vec<f64> = (0..traj.len())
        .map(|k| mode_coeff(&traj.total_u(k), mode, traj.grid.dx(), traj.grid.length).abs())
        .collect();
    let (rate, intercept, samples, t_start, t_end) = fit_growth_series(&traj.times, &amps, window)?;
    Ok(GrowthFit {
        mode,
        lambda: neumann_eigenvalue(traj.grid.length, mode),
        rate,
        intercept,
        samples,
        t_start,
        t_end,
    })
}

/// `|c_n|` of the first species at each snapshot.
pub fn mode_history(traj: &Trajectory, mode: usize) -> Vec<f64> {
    (0..traj.len())
        .map(|k| mode_coeff(&traj.total_u(k), mode, traj.grid.dx(), traj.grid.length).abs())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyCheck {
    pub steady: bool,
    /// Largest max-norm distance of any snapshot in the window from the final one.
    pub residual: f64,
    /// Max-norm of the final state.
    pub scale: f64,
    pub window: f64,
    pub tol: f64,
}

/// Steady when every snapshot within `window` of the end lies within `tol * scale` of the final state.
pub fn steady_check(traj: &Trajectory, window: f64, tol: f64) -> Result<SteadyCheck> {
    if traj.len() < 2 {
        return Err(Error::invalid("trajectory", "need at least two snapshots"));
    }
    let t_end = *traj.times.last().unwrap();
    let span = t_end - traj.times[0];
    if !(window > 0.0 && window <= span * (1.0 + 1e-12)) {
        return Err(Error::invalid("window", format!("must lie in (0, {span}], got {window}")));
    }
    let last = traj.states.last().unwrap();
    let scale = last.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    let mut residual = 0.0f64;
    for (t, state) in traj.times.iter().zip(&traj.states).rev() {
        if *t < t_end - window * (1.0 + 1e-12) {
            break;
        }
        for (f, g) in state.iter().zip(last) {
            for (a, b) in f.iter().zip(g) {
                residual = residual.max((a - b).abs());
            }
        }
    }
    Ok(SteadyCheck {
        steady: residual <= tol * scale,
        residual,
        scale,
        window,
        tol,
    })
}

/// Summary of a simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternReport {
    /// `max - min` of the first species at the final time.
    pub final_amplitude: f64,
    pub dominant_mode: usize,
    pub dominant_share: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_fit: Option<GrowthFit>,
    /// Why no growth fit is present, when one was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_fit_error: Option<String>,
    pub steady: SteadyCheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    /// Mode to fit; `None` skips the fit.
    pub fit_mode: Option<usize>,
    pub window: Option<GrowthWindow>,
    pub steady_window: f64,
    pub steady_tol: f64,
}

pub fn pattern_report(traj: &Trajectory, opts: &ReportOptions) -> Result<PatternReport> {
    let u = traj.total_u(traj.len() - 1);
    let spec = cosine_modes(&u, traj.grid.length);
    let (growth_fit, growth_fit_error) = match (opts.fit_mode, opts.window) {
        (Some(mode), Some(window)) => match fit_growth(traj, mode, window) {
            Ok(fit) => (Some(fit), None),
            Err(e) => (None, Some(e.to_string())),
        },
        _ => (None, None),
    };
    let span = traj.times.last().unwrap() - traj.times[0];
    Ok(PatternReport {
        final_amplitude: amplitude(&u),
        dominant_mode: spec.dominant_mode(),
        dominant_share: spec.dominant_share(),
        growth_fit,
        growth_fit_error,
        steady: steady_check(traj, opts.steady_window.min(span), opts.steady_tol)?,
    })
}

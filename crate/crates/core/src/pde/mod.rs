//! 1D method-of-lines integration with zero-flux boundaries.
//!
//! Limit systems discretise `Δ D(u, v)` as the Neumann Laplacian of the
//! pointwise composite `w_i = D(u_i, v_i)`. Fast systems are split (Strang)
//! into the stiff sub-state exchange, advanced exactly or implicitly, and the
//! remaining diffusion-reaction part.

mod blocks;
mod exchange;
pub mod grid;
pub mod init;
pub mod output;
mod rhs;
mod stepper;

pub use grid::{discrete_eigenvalue, neumann_laplacian, Grid1D};
pub use init::{initial_state, lift_to_fast, BaseState, InitialSpec, Perturbation};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Family, ModelSpec};
use rhs::Rhs;
use stepper::{Rk4, Sdirk};

/// Any density above this magnitude counts as blow-up.
pub const BLOWUP_THRESHOLD: f64 = 1e12;
/// Negative densities beyond `-POSITIVITY_TOL * scale` abort the run.
pub const POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Explicit RK4 under the diffusive step limit `safety dx² / (2 max(d1 D, d_v))`.
    #[default]
    Rk4,
    /// Two-stage L-stable SDIRK at `dt_max`, halving the step when Newton fails.
    Sdirk2,
}

fn default_safety() -> f64 {
    0.9
}
fn default_newton_tol() -> f64 {
    1e-10
}
fn default_max_newton() -> usize {
    8
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Controls {
    pub dt_max: f64,
    #[serde(default = "default_safety")]
    pub safety: f64,
    /// Time between stored snapshots.
    pub snapshot_every: f64,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
    #[serde(default = "default_max_newton")]
    pub max_newton: usize,
    /// Set to false for diffusion-only runs.
    #[serde(default = "default_true")]
    pub reactions: bool,
}

impl Default for Controls {
    fn default() -> Self {
        Self {
            dt_max: 0.1,
            safety: default_safety(),
            snapshot_every: 1.0,
            integrator: Integrator::Rk4,
            newton_tol: default_newton_tol(),
            max_newton: default_max_newton(),
            reactions: true,
        }
    }
}

impl Controls {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite and > 0, got {x}")))
            }
        };
        pos("controls.dt_max", self.dt_max)?;
        pos("controls.snapshot_every", self.snapshot_every)?;
        pos("controls.newton_tol", self.newton_tol)?;
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(Error::invalid("controls.safety", format!("must lie in (0, 1], got {}", self.safety)));
        }
        if self.max_newton == 0 {
            return Err(Error::invalid("controls.max_newton", "must be at least 1"));
        }
        Ok(())
    }
}

/// Densities on the grid: `(u, v)` for limit systems, `(u_a, u_b, v)` for fast systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub t: f64,
    pub fields: Vec<Vec<f64>>,
}

impl SimState {
    /// Spatially constant state; fast models are split on the quasi-steady manifold.
    pub fn homogeneous(model: &ModelSpec, grid: &Grid1D, u: f64, v: f64) -> Result<Self> {
        let n = grid.cells;
        let fields = if model.is_fast() {
            let (ua, ub) = model.quasi_steady_partition(u, v)?;
            vec![vec![ua; n], vec![ub; n], vec![v; n]]
        } else {
            vec![vec![u; n], vec![v; n]]
        };
        Ok(Self { t: 0.0, fields })
    }

    /// Total density of the first species (`u`, or `u_a + u_b`).
    pub fn total_u(&self) -> Vec<f64> {
        if self.fields.len() == 3 {
            self.fields[0].iter().zip(&self.fields[1]).map(|(a, b)| a + b).collect()
        } else {
            self.fields[0].clone()
        }
    }

    pub fn v(&self) -> &[f64] {
        self.fields.last().expect("state has fields")
    }

    fn check_shape(&self, model: &ModelSpec, grid: &Grid1D) -> Result<()> {
        let want = model.field_names().len();
        if self.fields.len() != want {
            return Err(Error::invalid(
                "initial",
                format!("model needs {want} fields, state has {}", self.fields.len()),
            ));
        }
        if let Some(f) = self.fields.iter().find(|f| f.len() != grid.cells) {
            return Err(Error::invalid("initial", format!("field has {} cells, grid has {}", f.len(), grid.cells)));
        }
        if !self.t.is_finite() {
            return Err(Error::invalid("initial.t", "must be finite"));
        }
        Ok(())
    }

    fn flatten(&self) -> Vec<f64> {
        self.fields.concat()
    }

    fn unflatten(t: f64, y: &[f64], m: usize) -> Self {
        let n = y.len() / m;
        Self {
            t,
            fields: y.chunks(n).map(<[f64]>::to_vec).collect(),
        }
    }
}

/// Step statistics aggregated between consecutive snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalDiagnostics {
    pub t_end: f64,
    pub steps: usize,
    pub dt_min: f64,
    pub dt_max: f64,
    pub rejected_steps: usize,
    pub newton_iterations: usize,
    pub max_density: f64,
    pub min_density: f64,
    /// Steps that ended with a negative density inside the tolerance band.
    pub positivity_violations: usize,
}

impl IntervalDiagnostics {
    fn new() -> Self {
        Self {
            t_end: f64::NAN,
            steps: 0,
            dt_min: f64::INFINITY,
            dt_max: 0.0,
            rejected_steps: 0,
            newton_iterations: 0,
            max_density: f64::NEG_INFINITY,
            min_density: f64::INFINITY,
            positivity_violations: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub field_names: Vec<String>,
    pub grid: Grid1D,
    pub times: Vec<f64>,
    /// `states[snapshot][field][cell]`.
    pub states: Vec<Vec<Vec<f64>>>,
    /// `diagnostics[k]` covers `(times[k], times[k + 1]]`.
    pub diagnostics: Vec<IntervalDiagnostics>,
    pub steps: usize,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn field(&self, snapshot: usize, name: &str) -> Option<&[f64]> {
        let k = self.field_names.iter().position(|f| f == name)?;
        Some(&self.states[snapshot][k])
    }

    pub fn state(&self, snapshot: usize) -> SimState {
        SimState {
            t: self.times[snapshot],
            fields: self.states[snapshot].clone(),
        }
    }

    pub fn final_state(&self) -> SimState {
        self.state(self.len() - 1)
    }

    /// Total first-species density at a snapshot.
    pub fn total_u(&self, snapshot: usize) -> Vec<f64> {
        self.state(snapshot).total_u()
    }
}

/// Advance only the `1/ε` exchange of a fast model by `dt`.
pub fn exchange_step(model: &ModelSpec, state: &mut SimState, dt: f64) -> Result<()> {
    let eps = model
        .epsilon()
        .ok_or_else(|| Error::invalid("model", "exchange step needs a fast-reaction variant"))?;
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", format!("must be > 0, got {dt}")));
    }
    let n = state.fields[0].len();
    let mut y = state.flatten();
    let scale = state_scale(&y);
    exchange(model, eps, &mut y, n, dt, POSITIVITY_TOL * scale)?;
    *state = SimState::unflatten(state.t, &y, 3);
    Ok(())
}

fn exchange(model: &ModelSpec, eps: f64, y: &mut [f64], n: usize, dt: f64, neg_tol: f64) -> Result<()> {
    match model.family() {
        Family::Avoidance | Family::Hiding => exchange::exchange_skt(&model.rates, eps, y, n, dt, neg_tol),
        Family::Starvation => exchange::exchange_dds(model.dds_params()?, &model.rates, eps, y, n, dt, neg_tol),
    }
}

fn state_scale(y: &[f64]) -> f64 {
    let s = y.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    if s > 0.0 && s.is_finite() {
        s
    } else {
        1.0
    }
}

enum Implicit {
    Two(Sdirk<2>),
    Three(Sdirk<3>),
}

impl Implicit {
    fn step(&mut self, rhs: &mut Rhs, y: &mut [f64], dt: f64) -> Result<usize> {
        match self {
            Implicit::Two(s) => s.step(rhs, y, dt),
            Implicit::Three(s) => s.step(rhs, y, dt),
        }
    }
}

enum Method {
    Explicit(Rk4),
    Implicit(Box<Implicit>),
}

/// Integrate `model` from `initial` to `t_end`, storing snapshots every `controls.snapshot_every`.
pub fn simulate(model: &ModelSpec, grid: &Grid1D, initial: &SimState, t_end: f64, controls: &Controls) -> Result<Trajectory> {
    model.validate()?;
    grid.validate()?;
    controls.validate()?;
    initial.check_shape(model, grid)?;
    if !(t_end > initial.t) {
        return Err(Error::invalid(
            "t_end",
            format!("must exceed the initial time {}, got {t_end}", initial.t),
        ));
    }
    let names = model.field_names();
    let m = names.len();
    let n = grid.cells;
    let dx = grid.dx();
    let mut y = initial.flatten();
    let scale = state_scale(&y);
    let neg_tol = POSITIVITY_TOL * scale;
    check_state(&y, n, names, initial.t, neg_tol, &mut IntervalDiagnostics::new())?;

    let mut rhs = Rhs::new(model, n, dx, controls.reactions, neg_tol)?;
    let mut method = match controls.integrator {
        Integrator::Rk4 => Method::Explicit(Rk4::new(m * n)),
        Integrator::Sdirk2 if m == 2 => Method::Implicit(Box::new(Implicit::Two(Sdirk::new(n, controls.newton_tol, controls.max_newton)))),
        Integrator::Sdirk2 => Method::Implicit(Box::new(Implicit::Three(Sdirk::new(n, controls.newton_tol, controls.max_newton)))),
    };
    let eps = model.epsilon();
    let dt_floor = 1e-12 * (t_end - initial.t);

    let mut traj = Trajectory {
        field_names: names.iter().map(|s| s.to_string()).collect(),
        grid: *grid,
        times: vec![initial.t],
        states: vec![initial.fields.clone()],
        diagnostics: Vec::new(),
        steps: 0,
    };
    let mut diag = IntervalDiagnostics::new();
    let mut t = initial.t;
    let mut k_snap = 1usize;
    let mut dt_try = controls.dt_max;
    let mut saved = y.clone();

    while t < t_end {
        let t_next = (initial.t + k_snap as f64 * controls.snapshot_every).min(t_end);
        let mut dt = match method {
            Method::Explicit(_) => controls
                .dt_max
                .min(controls.safety * dx * dx / (2.0 * rhs.max_effective_diffusivity(&y)?)),
            Method::Implicit(_) => dt_try,
        };
        let lands = t + dt >= t_next - 1e-12 * t_next.abs().max(1.0);
        if lands {
            dt = t_next - t;
        }
        saved.copy_from_slice(&y);
        let result = (|| -> Result<usize> {
            if let Some(eps) = eps {
                exchange(model, eps, &mut y, n, 0.5 * dt, neg_tol)?;
            }
            let iters = match &mut method {
                Method::Explicit(rk) => rk.step(&mut rhs, &mut y, dt).map(|_| 0)?,
                Method::Implicit(im) => im.step(&mut rhs, &mut y, dt)?,
            };
            if let Some(eps) = eps {
                exchange(model, eps, &mut y, n, 0.5 * dt, neg_tol)?;
            }
            Ok(iters)
        })();
        match result {
            Ok(iters) => {
                diag.newton_iterations += iters;
            }
            Err(Error::NonConvergence { what: "implicit stage", .. })
            | Err(Error::NonConvergence {
                what: "block factorisation (singular pivot)",
                ..
            }) if dt > dt_floor => {
                y.copy_from_slice(&saved);
                diag.rejected_steps += 1;
                dt_try = 0.5 * dt;
                continue;
            }
            Err(e) => return Err(e),
        }
        t = if lands { t_next } else { t + dt };
        traj.steps += 1;
        diag.steps += 1;
        diag.dt_min = diag.dt_min.min(dt);
        diag.dt_max = diag.dt_max.max(dt);
        check_state(&y, n, names, t, neg_tol, &mut diag)?;
        if !lands {
            dt_try = (2.0 * dt).min(controls.dt_max);
        }
        if lands {
            diag.t_end = t;
            traj.times.push(t);
            traj.states.push(SimState::unflatten(t, &y, m).fields);
            traj.diagnostics.push(diag);
            diag = IntervalDiagnostics::new();
            k_snap += 1;
        }
    }
    Ok(traj)
}

fn check_state(y: &[f64], n: usize, names: &[&'static str], t: f64, neg_tol: f64, diag: &mut IntervalDiagnostics) -> Result<()> {
    let mut negative = false;
    for (j, &x) in y.iter().enumerate() {
        if !x.is_finite() || x.abs() > BLOWUP_THRESHOLD {
            return Err(Error::BlowUp {
                t,
                field: names[j / n],
                index: j % n,
                value: x,
            });
        }
        if x < -neg_tol {
            return Err(Error::Positivity {
                t,
                field: names[j / n],
                index: j % n,
                value: x,
            });
        }
        negative |= x < 0.0;
        diag.max_density = diag.max_density.max(x);
        diag.min_density = diag.min_density.min(x);
    }
    if negative {
        diag.positivity_violations += 1;
    }
    Ok(())
}

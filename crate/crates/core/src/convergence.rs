//! Numerical check of the fast-reaction limit: the gap between `u_a + u_b` of the
//! ε-system and `u` of the limit system, started from matched data.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::pde::{lift_to_fast, simulate, Controls, Grid1D, SimState, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorNorm {
    /// `sqrt(dx Σ (u_ε - u)²)` at the final time.
    #[default]
    L2Final,
    /// The same spatial norm, maximised over snapshots.
    SupL2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub epsilons: Vec<f64>,
    pub errors: Vec<f64>,
    /// `ln(e_{k-1}/e_k) / ln(ε_{k-1}/ε_k)`; `None` for the first entry. Observational only.
    pub orders: Vec<Option<f64>>,
    pub norm: ErrorNorm,
    pub t_end: f64,
    pub steps: Vec<usize>,
}

impl SweepResult {
    /// Errors strictly decrease along the sweep, allowing ties within `tol`.
    pub fn is_decreasing(&self, tol: f64) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0] || (w[1] - w[0]).abs() <= tol)
    }

    /// CSV with columns `epsilon, error, order`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epsilon", "error", "order"])?;
        for ((e, err), ord) in self.epsilons.iter().zip(&self.errors).zip(&self.orders) {
            w.write_record([e.to_string(), err.to_string(), ord.map(|o| o.to_string()).unwrap_or_default()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `(fast, limit)` initial states: the limit state is `base`; the fast state is
/// split on the quasi-steady manifold so that `u_a + u_b = u` exactly.
pub fn matched_initial(fast: &ModelSpec, limit: &ModelSpec, base: &SimState) -> Result<(SimState, SimState)> {
    if !fast.is_fast() || limit.is_fast() {
        return Err(Error::invalid("model", "matched data needs a fast model and its limit"));
    }
    if fast.limit() != *limit {
        return Err(Error::invalid("model", "limit model does not belong to the fast model's family"));
    }
    Ok((lift_to_fast(fast, base)?, base.clone()))
}

fn l2(grid: &Grid1D, a: &[f64], b: &[f64]) -> f64 {
    (grid.dx() * a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>()).sqrt()
}

fn gap(grid: &Grid1D, fast: &Trajectory, limit: &Trajectory, norm: ErrorNorm) -> f64 {
    match norm {
        ErrorNorm::L2Final => l2(grid, &fast.total_u(fast.len() - 1), &limit.total_u(limit.len() - 1)),
        ErrorNorm::SupL2 => (0..fast.len().min(limit.len()))
            .map(|k| l2(grid, &fast.total_u(k), &limit.total_u(k)))
            .fold(0.0, f64::max),
    }
}

/// Run the limit model once and the ε-model for each `epsilons[k]` (in parallel),
/// all from `base` lifted onto the manifold, and measure the gap at matching snapshots.
pub fn epsilon_sweep(
    model: &ModelSpec,
    grid: &Grid1D,
    base: &SimState,
    t_end: f64,
    epsilons: &[f64],
    controls: &Controls,
    norm: ErrorNorm,
) -> Result<SweepResult> {
    if epsilons.is_empty() {
        return Err(Error::invalid("epsilons", "need at least one value"));
    }
    if let Some(e) = epsilons.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
        return Err(Error::invalid("epsilons", format!("all values must be finite and > 0, got {e}")));
    }
    if epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("epsilons", "values must be strictly decreasing"));
    }
    let limit = model.limit();
    let limit_traj = simulate(&limit, grid, base, t_end, controls).map_err(|e| e.context("limit run"))?;
    let runs: Vec<Result<(f64, usize)>> = epsilons
        .par_iter()
        .map(|&eps| {
            let fast = model.fast(eps);
            let (init, _) = matched_initial(&fast, &limit, base)?;
            let traj = simulate(&fast, grid, &init, t_end, controls).map_err(|e| e.context(format!("epsilon = {eps}")))?;
            Ok((gap(grid, &traj, &limit_traj, norm), traj.steps))
        })
        .collect();
    let mut errors = Vec::with_capacity(runs.len());
    let mut steps = Vec::with_capacity(runs.len());
    for r in runs {
        let (e, s) = r?;
        errors.push(e);
        steps.push(s);
    }
    let orders = (0..errors.len())
        .map(|k| (k > 0).then(|| (errors[k - 1] / errors[k]).ln() / (epsilons[k - 1] / epsilons[k]).ln()))
        .collect();
    Ok(SweepResult {
        epsilons: epsilons.to_vec(),
        errors,
        orders,
        norm,
        t_end,
        steps,
    })
}

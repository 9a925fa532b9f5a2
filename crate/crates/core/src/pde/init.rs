//! Initial data: a homogeneous base state plus a cosine or noise perturbation of `u`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Grid1D, SimState};
use crate::error::{Error, Result};
use crate::model::ModelSpec;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BaseState {
    /// The coexistence equilibrium `(u*, v*)`.
    #[default]
    Coexistence,
    Custom {
        u: f64,
        v: f64,
    },
}

/// Perturbation of `u`, with amplitude relative to the base value of `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Perturbation {
    None,
    /// `amplitude_rel u0 cos(n π x / L)`.
    Cosine {
        mode: usize,
        amplitude_rel: f64,
    },
    /// Independent uniform values in `[-1, 1] amplitude_rel u0` per cell, from the run seed.
    Noise {
        amplitude_rel: f64,
    },
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation::Cosine {
            mode: 1,
            amplitude_rel: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InitialSpec {
    #[serde(default)]
    pub base: BaseState,
    #[serde(default)]
    pub perturbation: Perturbation,
}

impl InitialSpec {
    pub fn base_values(&self, model: &ModelSpec) -> Result<(f64, f64)> {
        match self.base {
            BaseState::Coexistence => model.params.coexistence(),
            BaseState::Custom { u, v } => {
                if !(u.is_finite() && v.is_finite() && u >= 0.0 && v >= 0.0) {
                    return Err(Error::invalid(
                        "initial.base",
                        format!("densities must be finite and >= 0, got ({u}, {v})"),
                    ));
                }
                Ok((u, v))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let amp = match self.perturbation {
            Perturbation::None => return Ok(()),
            Perturbation::Cosine { amplitude_rel, .. } | Perturbation::Noise { amplitude_rel } => amplitude_rel,
        };
        if !(amp.is_finite() && (0.0..1.0).contains(&amp)) {
            return Err(Error::invalid(
                "initial.perturbation.amplitude_rel",
                format!("must lie in [0, 1), got {amp}"),
            ));
        }
        Ok(())
    }
}

/// Build the initial state; fast models start on the quasi-steady manifold.
pub fn initial_state(model: &ModelSpec, grid: &Grid1D, spec: &InitialSpec, seed: u64) -> Result<SimState> {
    spec.validate()?;
    let (u0, v0) = spec.base_values(model)?;
    let n = grid.cells;
    let u: Vec<f64> = match spec.perturbation {
        Perturbation::None => vec![u0; n],
        Perturbation::Cosine { mode, amplitude_rel } => {
            let a = amplitude_rel * u0;
            grid.centers()
                .iter()
                .map(|x| u0 + a * (mode as f64 * PI * x / grid.length).cos())
                .collect()
        }
        Perturbation::Noise { amplitude_rel } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = amplitude_rel * u0;
            (0..n).map(|_| u0 + a * rng.gen_range(-1.0..=1.0)).collect()
        }
    };
    let limit = SimState {
        t: 0.0,
        fields: vec![u, vec![v0; n]],
    };
    if model.is_fast() {
        lift_to_fast(model, &limit)
    } else {
        Ok(limit)
    }
}

/// Split a limit-system state `(u, v)` into `(u_a, u_b, v)` on the quasi-steady manifold.
pub fn lift_to_fast(model: &ModelSpec, limit: &SimState) -> Result<SimState> {
    if limit.fields.len() != 2 {
        return Err(Error::invalid("state", "expected a two-field (u, v) state"));
    }
    let (u, v) = (&limit.fields[0], &limit.fields[1]);
    let mut ua = Vec::with_capacity(u.len());
    let mut ub = Vec::with_capacity(u.len());
    for (&ui, &vi) in u.iter().zip(v) {
        let (a, b) = model.quasi_steady_partition(ui, vi)?;
        ua.push(a);
        // u_a + u_b = u exactly
        ub.push(ui - a);
        debug_assert!((b - (ui - a)).abs() <= 1e-12 * ui.max(1.0));
    }
    Ok(SimState {
        t: limit.t,
        fields: vec![ua, ub, v.clone()],
    })
}

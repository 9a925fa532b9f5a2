//! Linear stability of the coexistence state against heterogeneous perturbations.
//!
//! Linearising `u_t = Δ D(u,v) + f`, `v_t = d_v Δv + g` about a homogeneous
//! state and projecting on a Neumann eigenfunction with `-Δ`-eigenvalue `λ`
//! gives the mode matrix
//!
//! ```text
//! M(λ) = [ J11 - d1D λ   J12 - d2D λ ]
//!        [ J21           J22 - d_v λ ]
//! ```
//!
//! whose determinant is the quadratic `a2 λ² + b1 λ + c0` with
//! `a2 = d_v d1D`, `b1 = -d1D J22 - d_v J11 + d2D J21`, `c0 = det J`.

mod signs;
mod threshold;

pub use signs::{all_sign_patterns, b_sensitivity, sign_classify, Category, CrossDiffusionVerdict, D2Sign, Sign, SignPattern, SignStructure};
pub use threshold::{
    dds_necessary_condition, delta_star, hiding_stability_check, turing_threshold_plus, DdsCondition, DiscreteVerdict, HidingReport, HidingVerdict,
    ThresholdReason, ThresholdReport,
};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kinetics::{max_real_eigenvalue, Equilibrium, EquilibriumKind};
use crate::model::ModelSpec;
use crate::roots::quadratic_roots;

/// `λ_n = (nπ/L)²` for `n = 0..=n_max`.
pub fn neumann_eigenvalues(length: f64, n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| neumann_eigenvalue(length, n)).collect()
}

pub fn neumann_eigenvalue(length: f64, n: usize) -> f64 {
    let k = n as f64 * PI / length;
    k * k
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionCoeffs {
    pub a2: f64,
    pub b1: f64,
    pub c0: f64,
    /// `tr J` at the equilibrium.
    pub trace_j: f64,
    /// `d1D + d_v`, the rate at which the mode trace decreases with `λ`.
    pub diffusion_trace: f64,
}

impl DispersionCoeffs {
    pub fn mode_det(&self, lambda: f64) -> f64 {
        (self.a2 * lambda + self.b1) * lambda + self.c0
    }

    pub fn mode_trace(&self, lambda: f64) -> f64 {
        self.trace_j - self.diffusion_trace * lambda
    }
}

/// Open `λ`-interval on which the mode determinant is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnstableBand {
    pub lo: f64,
    pub hi: f64,
    /// The homogeneous mode is already unstable (`c0 < 0`).
    pub homogeneous_unstable: bool,
}

impl UnstableBand {
    pub fn contains(&self, lambda: f64) -> bool {
        lambda > self.lo && lambda < self.hi
    }

    /// Neumann modes `n >= 1` on `[0, L]` whose eigenvalue lies in the band.
    pub fn modes_in(&self, length: f64) -> Vec<usize> {
        let n_hi = (length * self.hi.sqrt() / PI).floor() as usize;
        (1..=n_hi).filter(|&n| self.contains(neumann_eigenvalue(length, n))).collect()
    }
}

/// Dispersion coefficients of `model` at the coexistence equilibrium `eq`.
pub fn dispersion_coeffs(model: &ModelSpec, eq: &Equilibrium) -> Result<DispersionCoeffs> {
    if eq.kind != EquilibriumKind::Coexistence {
        return Err(Error::invalid(
            "equilibrium",
            format!("dispersion analysis needs the coexistence state, got {:?}", eq.kind),
        ));
    }
    dispersion_coeffs_at(model, eq.u, eq.v)
}

/// Dispersion coefficients at an arbitrary homogeneous state `(u, v)`.
pub fn dispersion_coeffs_at(model: &ModelSpec, u: f64, v: f64) -> Result<DispersionCoeffs> {
    let p = &model.params;
    let j = p.jacobian(u, v).0;
    let (d1, d2) = model.diffusivity_grad(u, v)?;
    Ok(DispersionCoeffs {
        a2: p.d_v * d1,
        b1: -d1 * j[1][1] - p.d_v * j[0][0] + d2 * j[1][0],
        c0: j[0][0] * j[1][1] - j[0][1] * j[1][0],
        trace_j: j[0][0] + j[1][1],
        diffusion_trace: d1 + p.d_v,
    })
}

/// Coefficients at the model's coexistence state.
pub fn coexistence_coeffs(model: &ModelSpec) -> Result<DispersionCoeffs> {
    let (u, v) = model.params.coexistence()?;
    dispersion_coeffs_at(model, u, v)
}

/// Largest real part of the eigenvalues of the mode matrix at `λ`.
pub fn growth_rate(coeffs: &DispersionCoeffs, lambda: f64) -> f64 {
    max_real_eigenvalue(coeffs.mode_trace(lambda), coeffs.mode_det(lambda))
}

pub fn unstable_band(coeffs: &DispersionCoeffs) -> Option<UnstableBand> {
    let DispersionCoeffs { a2, b1, c0, .. } = *coeffs;
    if !(a2 > 0.0) {
        return None;
    }
    if c0 < 0.0 {
        let (_, hi) = quadratic_roots(a2, b1, c0)?;
        return Some(UnstableBand {
            lo: 0.0,
            hi,
            homogeneous_unstable: true,
        });
    }
    if c0 == 0.0 {
        return (b1 < 0.0).then(|| UnstableBand {
            lo: 0.0,
            hi: -b1 / a2,
            homogeneous_unstable: false,
        });
    }
    if b1 >= 0.0 || b1 * b1 - 4.0 * a2 * c0 <= 0.0 {
        return None;
    }
    let (lo, hi) = quadratic_roots(a2, b1, c0)?;
    Some(UnstableBand {
        lo,
        hi,
        homogeneous_unstable: false,
    })
}

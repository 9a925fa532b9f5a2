//! Closed-form instability thresholds for the three diffusivity families.

use serde::{Deserialize, Serialize};

use super::{dispersion_coeffs_at, unstable_band, UnstableBand};
use crate::diffusivity::{self, dds, DdsParams, TransitionRates};
use crate::error::{Error, Result};
use crate::kinetics::{Equilibrium, EquilibriumKind, ReactionParams};
use crate::model::{ModelSpec, Variant};
use crate::roots::quadratic_roots;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdReason {
    /// `alpha <= 0`: no cross-diffusion coefficient destabilises.
    AlphaNonpositive,
    /// `alpha > 0` but the configured `d12` does not exceed `d12_plus`.
    BelowThreshold,
    /// The configured `d12` exceeds `d12_plus`.
    AboveThreshold,
}

/// Which Neumann modes of a finite interval fall in the unstable band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteVerdict {
    pub length: f64,
    pub unstable_modes: Vec<usize>,
    pub unstable: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub u_star: f64,
    pub v_star: f64,
    pub phi_star: f64,
    pub phi_prime_star: f64,
    pub det_j: f64,
    pub alpha: f64,
    pub beta: f64,
    pub tilde_d12: Option<f64>,
    pub d12_minus: Option<f64>,
    pub d12_plus: Option<f64>,
    /// Discriminant (quarter-scaled) of the quadratic `Δ*(d12)`, consistent with the root formula.
    pub delta_star_star: Option<f64>,
    /// Alternative closed form of the same quantity.
    /// It disagrees with the expansion of the quadratic and is reported for comparison only.
    pub delta_star_star_statement: f64,
    /// Coefficients `(A, B, C)` of `Δ*(d12) = A d12² + B d12 + C`.
    pub quadratic: [f64; 3],
    /// The `d12` the report was evaluated at.
    pub d12: f64,
    pub turing_possible: bool,
    pub reason: ThresholdReason,
    pub band: Option<UnstableBand>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discrete: Option<DiscreteVerdict>,
}

impl ThresholdReport {
    /// Attach the finite-domain verdict for an interval of length `length`.
    pub fn with_domain(mut self, length: f64) -> Self {
        let unstable_modes = self.band.map(|b| b.modes_in(length)).unwrap_or_default();
        self.discrete = Some(DiscreteVerdict {
            length,
            unstable: !unstable_modes.is_empty(),
            unstable_modes,
        });
        self
    }
}

fn avoidance_model(p: &ReactionParams, rates: &TransitionRates) -> ModelSpec {
    ModelSpec {
        variant: Variant::SktPlusLimit,
        params: *p,
        rates: rates.clone(),
        dds: None,
    }
}

/// Threshold on `d12` above which the avoidance system's coexistence state is Turing unstable.
///
/// `alpha = r21 u* phi'(v*) - r22 phi(v*)`, `beta = d_u r22 v* + d_v r11 u*`,
/// and `d12_±` are the roots of
/// `Δ*(d12) = (alpha v*)² d12² - 2(alpha beta v* + 2 d_v phi det J) d12 + beta² - 4 d_u d_v det J`.
pub fn turing_threshold_plus(p: &ReactionParams, rates: &TransitionRates) -> Result<ThresholdReport> {
    p.validate()?;
    let (u, v) = p.weak_coexistence("turing threshold")?;
    let phi = diffusivity::phi(rates, v)?;
    let dphi = diffusivity::phi_prime(rates, v)?;
    let det_j = u * v * p.rst().0;
    let alpha = p.r21 * u * dphi - p.r22 * phi;
    let beta = p.d_u * p.r22 * v + p.d_v * p.r11 * u;

    let av = alpha * v;
    let qa = av * av;
    let qb = -2.0 * (alpha * beta * v + 2.0 * p.d_v * phi * det_j);
    let qc = beta * beta - 4.0 * p.d_u * p.d_v * det_j;
    let statement = (p.d_v * phi * det_j).powi(2) + av * (beta * phi + p.d_v * av);

    let band = unstable_band(&dispersion_coeffs_at(&avoidance_model(p, rates), u, v)?);

    let mut report = ThresholdReport {
        u_star: u,
        v_star: v,
        phi_star: phi,
        phi_prime_star: dphi,
        det_j,
        alpha,
        beta,
        tilde_d12: None,
        d12_minus: None,
        d12_plus: None,
        delta_star_star: None,
        delta_star_star_statement: statement,
        quadratic: [qa, qb, qc],
        d12: p.d12,
        turing_possible: false,
        reason: ThresholdReason::AlphaNonpositive,
        band,
        discrete: None,
    };
    if alpha <= 0.0 {
        return Ok(report);
    }
    report.tilde_d12 = Some(beta / av);
    // d12± = (-qb/2 ± 2 sqrt(Δ**)) / qa
    report.delta_star_star = Some(0.25 * (0.25 * qb * qb - qa * qc));
    if let Some((lo, hi)) = quadratic_roots(qa, qb, qc) {
        report.d12_minus = Some(lo);
        report.d12_plus = Some(hi);
        report.turing_possible = p.d12 > hi;
    }
    report.reason = if report.turing_possible {
        ThresholdReason::AboveThreshold
    } else {
        ThresholdReason::BelowThreshold
    };
    Ok(report)
}

/// `Δ* = b1² - 4 a2 c0` evaluated from the dispersion coefficients of the avoidance
/// system at the given `d12`, without going through `alpha` and `beta`.
pub fn delta_star(p: &ReactionParams, rates: &TransitionRates, d12: f64) -> Result<f64> {
    let (u, v) = p.coexistence()?;
    let c = dispersion_coeffs_at(&avoidance_model(&p.with_d12(d12), rates), u, v)?;
    Ok(c.b1 * c.b1 - 4.0 * c.a2 * c.c0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HidingVerdict {
    AlwaysStable,
    /// `b1 <= 0` was observed; this contradicts the sign argument and indicates invalid input.
    Counterexample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HidingReport {
    pub b1: f64,
    /// `d1D- r22 v*`, `d_v r11 u*`, `-d2D- r21 v*`.
    pub summands: [f64; 3],
    pub d2_sign: f64,
    pub verdict: HidingVerdict,
    pub note: String,
}

/// Sign decomposition showing that the hiding system cannot have `b1 < 0`.
pub fn hiding_stability_check(p: &ReactionParams, rates: &TransitionRates) -> Result<HidingReport> {
    p.validate()?;
    diffusivity::check_hiding(p)?;
    let (u, v) = p.weak_coexistence("hiding stability check")?;
    let (d1, d2) = diffusivity::grad_d_minus(p, rates, u, v)?;
    let summands = [d1 * p.r22 * v, p.d_v * p.r11 * u, -d2 * p.r21 * v];
    let b1 = summands.iter().sum::<f64>();
    let ok = summands[0] > 0.0 && summands[1] > 0.0 && summands[2] >= 0.0 && b1 > 0.0;
    Ok(HidingReport {
        b1,
        summands,
        d2_sign: d2.signum() * (d2 != 0.0) as i32 as f64,
        verdict: if ok {
            HidingVerdict::AlwaysStable
        } else {
            HidingVerdict::Counterexample
        },
        note: "hiding behaviour: b1 > 0 for every admissible phi, so Turing patterns do not occur".into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DdsCondition {
    pub u_a: f64,
    pub u_b: f64,
    /// `d3 Q` at the partitioned equilibrium.
    pub dq_dv: f64,
    /// `(d_b - d_a) d3 Q`; the condition is `lhs < 0`.
    pub lhs: f64,
    /// `d2 D` at the equilibrium, positive exactly when the condition holds.
    pub d2_d: f64,
    pub satisfied: bool,
}

/// Necessary condition `(d_b - d_a) d3 Q < 0` for Turing instability of the starvation model.
pub fn dds_necessary_condition(dp: &DdsParams, rates: &TransitionRates, eq: &Equilibrium) -> Result<DdsCondition> {
    if eq.kind != EquilibriumKind::Coexistence {
        return Err(Error::invalid("equilibrium", "necessary condition is evaluated at the coexistence state"));
    }
    dp.validate()?;
    let part = dds::dds_partition(dp, rates, eq.u, eq.v)?;
    let (_, _, q3) = dds::q_partials(dp, rates, part.u_a, part.u_b, eq.v)?;
    let partials = dds::partials_at(dp, rates, &part, eq.v)?;
    let (_, d2_d) = dds::grad_from_partials(dp, &partials);
    let lhs = (dp.d_b - dp.d_a) * q3;
    Ok(DdsCondition {
        u_a: part.u_a,
        u_b: part.u_b,
        dq_dv: q3,
        lhs,
        d2_d,
        satisfied: lhs < 0.0,
    })
}

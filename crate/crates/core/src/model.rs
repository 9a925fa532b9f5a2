//! Which dynamical system to analyse or integrate.

use serde::{Deserialize, Serialize};

use crate::diffusivity::{self, dds, DdsParams, TransitionRates};
use crate::error::{Error, Result};
use crate::kinetics::ReactionParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Variant {
    /// Cross-diffusion system with `D+` (avoidance).
    SktPlusLimit,
    /// Cross-diffusion system with `D-` (hiding).
    SktMinusLimit,
    /// Three-field fast-reaction system whose limit is `SktPlusLimit`.
    SktFastPlus { epsilon: f64 },
    /// Three-field fast-reaction system whose limit is `SktMinusLimit`.
    SktFastMinus { epsilon: f64 },
    /// Starvation model with implicit partition.
    DdsLimit,
    /// Fast-reaction starvation model.
    DdsFast { epsilon: f64 },
}

/// Diffusivity family shared by a limit system and its fast-reaction parent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Avoidance,
    Hiding,
    Starvation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub variant: Variant,
    pub params: ReactionParams,
    pub rates: TransitionRates,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dds: Option<DdsParams>,
}

impl ModelSpec {
    pub fn new(variant: Variant, params: ReactionParams, rates: TransitionRates, dds: Option<DdsParams>) -> Result<Self> {
        let spec = Self { variant, params, rates, dds };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.rates.validate()?;
        if let Some(eps) = self.epsilon() {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::invalid("model.epsilon", format!("must be finite and > 0, got {eps}")));
            }
        }
        match self.family() {
            Family::Avoidance | Family::Hiding => {
                if self.family() == Family::Hiding {
                    diffusivity::check_hiding(&self.params)?;
                }
                let upper = 10.0 * self.params.r_v / self.params.r22;
                self.rates.check_skt_admissible(upper)?;
            }
            Family::Starvation => {
                let dp = self.dds.ok_or_else(|| Error::invalid("dds", "starvation models need DDS parameters"))?;
                dp.validate()?;
                self.rates.check_dds_admissible(100.0)?;
            }
        }
        Ok(())
    }

    pub fn family(&self) -> Family {
        match self.variant {
            Variant::SktPlusLimit | Variant::SktFastPlus { .. } => Family::Avoidance,
            Variant::SktMinusLimit | Variant::SktFastMinus { .. } => Family::Hiding,
            Variant::DdsLimit | Variant::DdsFast { .. } => Family::Starvation,
        }
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self.variant {
            Variant::SktFastPlus { epsilon } | Variant::SktFastMinus { epsilon } | Variant::DdsFast { epsilon } => Some(epsilon),
            _ => None,
        }
    }

    pub fn is_fast(&self) -> bool {
        self.epsilon().is_some()
    }

    pub fn field_names(&self) -> &'static [&'static str] {
        if self.is_fast() {
            &["u_a", "u_b", "v"]
        } else {
            &["u", "v"]
        }
    }

    pub fn dds_params(&self) -> Result<&DdsParams> {
        self.dds
            .as_ref()
            .ok_or_else(|| Error::invalid("dds", "starvation models need DDS parameters"))
    }

    /// The limit system of a fast variant (identity for limit variants).
    pub fn limit(&self) -> ModelSpec {
        let variant = match self.family() {
            Family::Avoidance => Variant::SktPlusLimit,
            Family::Hiding => Variant::SktMinusLimit,
            Family::Starvation => Variant::DdsLimit,
        };
        ModelSpec { variant, ..self.clone() }
    }

    /// The fast-reaction parent of this model's family at `epsilon`.
    pub fn fast(&self, epsilon: f64) -> ModelSpec {
        let variant = match self.family() {
            Family::Avoidance => Variant::SktFastPlus { epsilon },
            Family::Hiding => Variant::SktFastMinus { epsilon },
            Family::Starvation => Variant::DdsFast { epsilon },
        };
        ModelSpec { variant, ..self.clone() }
    }

    /// Diffusion coefficients `(d_a, d_b)` of the two sub-states.
    pub fn substate_diffusion(&self) -> (f64, f64) {
        let p = &self.params;
        match self.family() {
            Family::Avoidance => (p.d_u, p.d_u + p.d12),
            Family::Hiding => (p.d_u, p.d_u - p.d12),
            Family::Starvation => {
                let dp = self.dds.expect("validated starvation model has DDS parameters");
                (dp.d_a, dp.d_b)
            }
        }
    }

    /// Limit-system diffusivity `D(u, v)`.
    pub fn diffusivity(&self, u: f64, v: f64) -> Result<f64> {
        match self.family() {
            Family::Avoidance => diffusivity::d_plus(&self.params, &self.rates, u, v),
            Family::Hiding => diffusivity::d_minus(&self.params, &self.rates, u, v),
            Family::Starvation => dds::d_dds(self.dds_params()?, &self.rates, u, v),
        }
    }

    /// `(d1 D, d2 D)` of the limit-system diffusivity.
    pub fn diffusivity_grad(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        match self.family() {
            Family::Avoidance => diffusivity::grad_d_plus(&self.params, &self.rates, u, v),
            Family::Hiding => diffusivity::grad_d_minus(&self.params, &self.rates, u, v),
            Family::Starvation => dds::grad_d_dds(self.dds_params()?, &self.rates, u, v),
        }
    }

    /// Quasi-steady split `(u_a, u_b)` of a total density `u`.
    pub fn quasi_steady_partition(&self, u: f64, v: f64) -> Result<(f64, f64)> {
        match self.family() {
            Family::Avoidance | Family::Hiding => {
                let u_b = diffusivity::phi(&self.rates, v)? * u;
                Ok((u - u_b, u_b))
            }
            Family::Starvation => {
                let part = dds::dds_partition(self.dds_params()?, &self.rates, u, v)?;
                Ok((part.u_a, part.u_b))
            }
        }
    }
}

//! Diffusivity functions of the triangular cross-diffusion systems.
//!
//! The avoidance and hiding systems share the switching function
//! `phi = h/(h+k)` and differ in the sign of its contribution:
//! `D+(u,v) = u (d_u + d12 phi(v))` and `D-(u,v) = u (d_u - d12 phi(v))`.
//! The starvation system has `D(u,v) = d_a u_a + d_b u_b` with an implicitly
//! defined partition, see [`dds`].

pub mod dds;
mod pchip;
pub mod rates;

pub use dds::{d_dds, dds_partials, dds_partition, dds_partition_from, grad_d_dds, q_partials, DdsParams, DdsPartials, Partition};
pub use pchip::Pchip;
pub use rates::{RateValues, Tabulated, TabulatedSpec, TransitionRates};

use crate::error::{Error, Result};
use crate::kinetics::ReactionParams;

/// `phi(v) = h(v) / (h(v) + k(v))`.
pub fn phi(rates: &TransitionRates, v: f64) -> Result<f64> {
    match *rates {
        TransitionRates::SktLinear { m } => {
            rates.eval(v)?;
            Ok(v / m)
        }
        _ => {
            let r = rates.eval(v)?;
            Ok(r.h / (r.h + r.k))
        }
    }
}

/// `phi'(v) = (h' k - h k') / (h + k)^2`.
pub fn phi_prime(rates: &TransitionRates, v: f64) -> Result<f64> {
    match *rates {
        TransitionRates::SktLinear { m } => {
            rates.eval(v)?;
            Ok(1.0 / m)
        }
        _ => {
            let r = rates.eval(v)?;
            let s = r.h + r.k;
            Ok((r.dh * r.k - r.h * r.dk) / (s * s))
        }
    }
}

pub fn d_plus(p: &ReactionParams, rates: &TransitionRates, u: f64, v: f64) -> Result<f64> {
    Ok(u * (p.d_u + p.d12 * phi(rates, v)?))
}

/// `(d1 D+, d2 D+) = (d_u + d12 phi, d12 u phi')`.
pub fn grad_d_plus(p: &ReactionParams, rates: &TransitionRates, u: f64, v: f64) -> Result<(f64, f64)> {
    Ok((p.d_u + p.d12 * phi(rates, v)?, p.d12 * u * phi_prime(rates, v)?))
}

/// The hiding model needs `d12 < d_u` so that `D-` stays positive.
pub fn check_hiding(p: &ReactionParams) -> Result<()> {
    if p.d12 < p.d_u {
        Ok(())
    } else {
        Err(Error::invalid(
            "d12",
            format!("hiding model requires d12 < d_u, got d12 = {} >= d_u = {}", p.d12, p.d_u),
        ))
    }
}

pub fn d_minus(p: &ReactionParams, rates: &TransitionRates, u: f64, v: f64) -> Result<f64> {
    check_hiding(p)?;
    Ok(u * (p.d_u - p.d12 * phi(rates, v)?))
}

/// `(d1 D-, d2 D-) = (d_u - d12 phi, -d12 u phi')`.
pub fn grad_d_minus(p: &ReactionParams, rates: &TransitionRates, u: f64, v: f64) -> Result<(f64, f64)> {
    check_hiding(p)?;
    Ok((p.d_u - p.d12 * phi(rates, v)?, -p.d12 * u * phi_prime(rates, v)?))
}

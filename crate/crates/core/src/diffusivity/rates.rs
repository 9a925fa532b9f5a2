//! Transition-rate families `(h, k)` for the switching between sub-states.

use serde::{Deserialize, Serialize};

use super::pchip::Pchip;
use crate::error::{Error, Result};

/// Number of interior sample points used by the admissibility checks.
const ADMISSIBILITY_SAMPLES: usize = 257;

/// `h`, `k` and their derivatives at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateValues {
    pub h: f64,
    pub k: f64,
    pub dh: f64,
    pub dk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TransitionRates {
    /// `h(v) = v/M`, `k(v) = 1 - v/M` on `[0, M]`.
    SktLinear { m: f64 },
    /// `h(w) = h0 + w`, `k(w) = k0 + w`.
    Affine { h0: f64, k0: f64 },
    /// `h(w) = (h0 + w)^alpha`, `k(w) = (k0 + w)^beta`.
    PowerLaw { h0: f64, k0: f64, alpha: f64, beta: f64 },
    /// Tabulated `h`, `k` with monotone cubic interpolation.
    Custom(Tabulated),
}

impl TransitionRates {
    /// Linear SKT rates with `M` defaulting to 110% of the logistic carrying value of `v`.
    pub fn skt_linear_default(r_v: f64, r22: f64) -> Self {
        TransitionRates::SktLinear { m: 1.1 * r_v / r22 }
    }

    pub fn validate(&self) -> Result<()> {
        let finite_pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
            }
        };
        match *self {
            TransitionRates::SktLinear { m } => finite_pos("rates.m", m),
            TransitionRates::Affine { h0, k0 } => {
                finite_pos("rates.h0", h0)?;
                finite_pos("rates.k0", k0)
            }
            TransitionRates::PowerLaw { h0, k0, alpha, beta } => {
                finite_pos("rates.h0", h0)?;
                if !(k0.is_finite() && k0 >= 0.0) {
                    return Err(Error::invalid("rates.k0", format!("must be finite and >= 0, got {k0}")));
                }
                finite_pos("rates.alpha", alpha)?;
                if !(beta.is_finite() && alpha <= beta) {
                    return Err(Error::invalid("rates.beta", format!("need 0 < alpha <= beta, got {alpha}, {beta}")));
                }
                Ok(())
            }
            TransitionRates::Custom(_) => Ok(()),
        }
    }

    /// Closed interval on which the family may be evaluated.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            TransitionRates::SktLinear { m } => (0.0, *m),
            TransitionRates::Affine { .. } | TransitionRates::PowerLaw { .. } => (0.0, f64::INFINITY),
            TransitionRates::Custom(t) => t.h.domain(),
        }
    }

    fn check_domain(&self, w: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        if w >= lo && w <= hi {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "transition-rate argument",
                value: w,
                lo,
                hi,
            })
        }
    }

    pub fn eval(&self, w: f64) -> Result<RateValues> {
        self.check_domain(w)?;
        Ok(match *self {
            TransitionRates::SktLinear { m } => RateValues {
                h: w / m,
                k: 1.0 - w / m,
                dh: 1.0 / m,
                dk: -1.0 / m,
            },
            TransitionRates::Affine { h0, k0 } => RateValues {
                h: h0 + w,
                k: k0 + w,
                dh: 1.0,
                dk: 1.0,
            },
            TransitionRates::PowerLaw { h0, k0, alpha, beta } => RateValues {
                h: (h0 + w).powf(alpha),
                k: (k0 + w).powf(beta),
                dh: alpha * (h0 + w).powf(alpha - 1.0),
                dk: beta * (k0 + w).powf(beta - 1.0),
            },
            TransitionRates::Custom(ref t) => {
                let (h, dh) = t.h.eval(w);
                let (k, dk) = t.k.eval(w);
                RateValues { h, k, dh, dk }
            }
        })
    }

    pub fn h(&self, w: f64) -> Result<f64> {
        Ok(self.eval(w)?.h)
    }

    pub fn k(&self, w: f64) -> Result<f64> {
        Ok(self.eval(w)?.k)
    }

    /// Sampled check of the avoidance/hiding hypotheses on `[0, upper]`:
    /// `0 < h, k <= 1`, `h' >= 0`, `k' <= 0`.
    ///
    /// Endpoints are excluded so that the linear family (which vanishes at both
    /// ends of its range) qualifies.
    pub fn check_skt_admissible(&self, upper: f64) -> Result<()> {
        self.validate()?;
        let (lo, hi) = self.domain();
        let hi = hi.min(upper);
        for w in interior_samples(lo, hi) {
            let r = self.eval(w)?;
            let ok = r.h > 0.0 && r.h <= 1.0 && r.k > 0.0 && r.k <= 1.0 && r.dh >= 0.0 && r.dk <= 0.0;
            if !ok {
                return Err(Error::invalid("rates", format!("not admissible for SKT models at w = {w}: {r:?}")));
            }
        }
        Ok(())
    }

    /// Sampled check of the starvation-model hypotheses on `[0, upper]`:
    /// `h, k > 0`, both non-decreasing, bounded derivatives.
    pub fn check_dds_admissible(&self, upper: f64) -> Result<()> {
        self.validate()?;
        let (lo, hi) = self.domain();
        let hi = hi.min(upper);
        for w in interior_samples(lo, hi) {
            let r = self.eval(w)?;
            let ok = r.h > 0.0 && r.k > 0.0 && r.dh >= 0.0 && r.dk >= 0.0 && r.dh.is_finite() && r.dk.is_finite();
            if !ok {
                return Err(Error::invalid(
                    "rates",
                    format!("not admissible for the starvation model at w = {w}: {r:?}"),
                ));
            }
        }
        Ok(())
    }
}

fn interior_samples(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    let n = ADMISSIBILITY_SAMPLES;
    (0..n).map(move |i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64)
}

/// Knot table for a tabulated rate family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedSpec {
    pub knots: Vec<f64>,
    pub h: Vec<f64>,
    pub k: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TabulatedSpec", into = "TabulatedSpec")]
pub struct Tabulated {
    spec: TabulatedSpec,
    h: Pchip,
    k: Pchip,
}

impl Tabulated {
    pub fn new(spec: TabulatedSpec) -> Result<Self> {
        let h = Pchip::new(&spec.knots, &spec.h)?;
        let k = Pchip::new(&spec.knots, &spec.k)?;
        Ok(Self { spec, h, k })
    }

    pub fn spec(&self) -> &TabulatedSpec {
        &self.spec
    }
}

impl TryFrom<TabulatedSpec> for Tabulated {
    type Error = Error;

    fn try_from(spec: TabulatedSpec) -> Result<Self> {
        Tabulated::new(spec)
    }
}

impl From<Tabulated> for TabulatedSpec {
    fn from(t: Tabulated) -> Self {
        t.spec
    }
}

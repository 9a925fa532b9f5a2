//! Implicit sub-population partition of the dietary-diversity/starvation model.
//!
//! Given the total density `u` and competitor `v`, the pair `(u_a, u_b)` is
//! the root of
//!
//! ```text
//! u = u_a + u_b,
//! Q(u_a, u_b, v) = k(b u_b + d v) u_b - h(a u_a + c v) u_a = 0.
//! ```
//!
//! Along `u_a = u - u_b` the map `u_b -> Q` is strictly increasing when `h`
//! and `k` are positive and non-decreasing, so the root on `[0, u]` is unique.

use serde::{Deserialize, Serialize};

use super::rates::{RateValues, TransitionRates};
use crate::error::{Error, Result};
use crate::roots::{newton_bisect, RootOptions};

/// Residual tolerance of the partition solve, relative to the magnitude of `Q`'s terms.
pub const PARTITION_TOL: f64 = 1e-12;
pub const PARTITION_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DdsParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub d_a: f64,
    pub d_b: f64,
}

impl DdsParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("dds.a", self.a),
            ("dds.b", self.b),
            ("dds.d", self.d),
            ("dds.d_a", self.d_a),
            ("dds.d_b", self.d_b),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {value}")));
            }
        }
        if !(self.c.is_finite() && self.c >= 0.0) {
            return Err(Error::invalid("dds.c", format!("must be finite and >= 0, got {}", self.c)));
        }
        Ok(())
    }

    /// Arguments of `h` and `k` inside `Q`.
    fn args(&self, u_a: f64, u_b: f64, v: f64) -> (f64, f64) {
        (self.a * u_a + self.c * v, self.b * u_b + self.d * v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub u_a: f64,
    pub u_b: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// `(d1 u_b, d2 u_b, d1 u_a, d2 u_a)` with respect to `(u, v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DdsPartials {
    pub du_b_du: f64,
    pub du_b_dv: f64,
    pub du_a_du: f64,
    pub du_a_dv: f64,
}

/// `Q(u_a, u_b, v)`.
pub fn q_value(dp: &DdsParams, rates: &TransitionRates, u_a: f64, u_b: f64, v: f64) -> Result<f64> {
    let (wh, wk) = dp.args(u_a, u_b, v);
    Ok(rates.k(wk)? * u_b - rates.h(wh)? * u_a)
}

/// Partial derivatives `(d1 Q, d2 Q, d3 Q)` of `Q` in `(u_a, u_b, v)`.
pub fn q_partials(dp: &DdsParams, rates: &TransitionRates, u_a: f64, u_b: f64, v: f64) -> Result<(f64, f64, f64)> {
    let (wh, wk) = dp.args(u_a, u_b, v);
    let rh = rates.eval(wh)?;
    let rk = rates.eval(wk)?;
    Ok(q_partials_from(dp, rh, rk, u_a, u_b))
}

fn q_partials_from(dp: &DdsParams, rh: RateValues, rk: RateValues, u_a: f64, u_b: f64) -> (f64, f64, f64) {
    (
        -(rh.h + dp.a * u_a * rh.dh),
        rk.k + dp.b * u_b * rk.dk,
        dp.d * u_b * rk.dk - dp.c * u_a * rh.dh,
    )
}

/// Natural magnitude of `Q` on `[0, u]`: `F(0) = -u h(au+cv)`, `F(u) = u k(bu+dv)`.
pub fn partition_scale(dp: &DdsParams, rates: &TransitionRates, u: f64, v: f64) -> Result<f64> {
    let h_top = rates.h(dp.a * u + dp.c * v)?;
    let k_top = rates.k(dp.b * u + dp.d * v)?;
    Ok((u * (h_top + k_top)).max(1.0))
}

pub fn dds_partition(dp: &DdsParams, rates: &TransitionRates, u: f64, v: f64) -> Result<Partition> {
    dds_partition_from(dp, rates, u, v, None)
}

/// Solve the partition, optionally warm-starting Newton at `guess` for `u_b`.
pub fn dds_partition_from(dp: &DdsParams, rates: &TransitionRates, u: f64, v: f64, guess: Option<f64>) -> Result<Partition> {
    if !(u >= 0.0 && v >= 0.0) {
        return Err(Error::Domain {
            what: "partition density",
            value: u.min(v),
            lo: 0.0,
            hi: f64::INFINITY,
        });
    }
    if u == 0.0 {
        return Ok(Partition {
            u_a: 0.0,
            u_b: 0.0,
            residual: 0.0,
            iterations: 0,
        });
    }
    // Both h and k are only ever evaluated on these ranges; a domain check of the
    // endpoints covers every Newton iterate.
    for w in [dp.c * v, dp.a * u + dp.c * v, dp.d * v, dp.b * u + dp.d * v] {
        rates.eval(w)?;
    }
    let scale = partition_scale(dp, rates, u, v)?;
    let x0 = match guess {
        Some(g) if g.is_finite() => g.clamp(0.0, u),
        _ => {
            let h = rates.h(dp.a * u + dp.c * v)?;
            let k = rates.k(dp.d * v)?;
            u * h / (h + k)
        }
    };
    let f = |x: f64| {
        let u_a = u - x;
        let (wh, wk) = dp.args(u_a, x, v);
        let rh = rates.eval(wh).expect("argument inside checked range");
        let rk = rates.eval(wk).expect("argument inside checked range");
        let (q1, q2, _) = q_partials_from(dp, rh, rk, u_a, x);
        (rk.k * x - rh.h * u_a, q2 - q1)
    };
    let opts = RootOptions {
        f_tol: 0.01 * PARTITION_TOL * scale,
        max_iter: PARTITION_MAX_ITER,
    };
    let root = newton_bisect(f, 0.0, u, x0, opts).map_err(|_| Error::NonConvergence {
        what: "partition solve",
        iterations: PARTITION_MAX_ITER,
        index: None,
    })?;
    let u_b = root.x.clamp(0.0, u);
    Ok(Partition {
        u_a: u - u_b,
        u_b,
        residual: root.residual,
        iterations: root.iterations,
    })
}

/// Implicit-function derivatives of the partition at an already solved point.
pub fn partials_at(dp: &DdsParams, rates: &TransitionRates, part: &Partition, v: f64) -> Result<DdsPartials> {
    let (q1, q2, q3) = q_partials(dp, rates, part.u_a, part.u_b, v)?;
    let denom = q2 - q1;
    let du_b_du = -q1 / denom;
    let du_b_dv = -q3 / denom;
    Ok(DdsPartials {
        du_b_du,
        du_b_dv,
        du_a_du: 1.0 - du_b_du,
        du_a_dv: -du_b_dv,
    })
}

pub fn dds_partials(dp: &DdsParams, rates: &TransitionRates, u: f64, v: f64) -> Result<DdsPartials> {
    let part = dds_partition(dp, rates, u, v)?;
    partials_at(dp, rates, &part, v)
}

/// `D(u, v) = d_a u_a + d_b u_b`.
pub fn d_dds(dp: &DdsParams, rates: &TransitionRates, u: f64, v: f64) -> Result<f64> {
    let part = dds_partition(dp, rates, u, v)?;
    Ok(dp.d_a * part.u_a + dp.d_b * part.u_b)
}

/// `(d_a + (d_b - d_a) d1 u_b, (d_b - d_a) d2 u_b)`.
pub fn grad_d_dds(dp: &DdsParams, rates: &TransitionRates, u: f64, v: f64) -> Result<(f64, f64)> {
    let p = dds_partials(dp, rates, u, v)?;
    Ok(grad_from_partials(dp, &p))
}

pub fn grad_from_partials(dp: &DdsParams, p: &DdsPartials) -> (f64, f64) {
    (dp.d_a + (dp.d_b - dp.d_a) * p.du_b_du, (dp.d_b - dp.d_a) * p.du_b_dv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn affine() -> TransitionRates {
        TransitionRates::Affine { h0: 1.0, k0: 1.0 }
    }

    fn params(a: f64, b: f64, c: f64, d: f64) -> DdsParams {
        DdsParams {
            a,
            b,
            c,
            d,
            d_a: 1.0,
            d_b: 3.0,
        }
    }

    /// Plain bisection on F(u_b), independent of the Newton path.
    fn bisect_partition(dp: &DdsParams, rates: &TransitionRates, u: f64, v: f64) -> f64 {
        let f = |x: f64| q_value(dp, rates, u - x, x, v).unwrap();
        let (mut lo, mut hi) = (0.0, u);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn zero_density_partition() {
        let p = dds_partition(&params(1.0, 1.0, 0.0, 1.0), &affine(), 0.0, 0.7).unwrap();
        assert_eq!((p.u_a, p.u_b), (0.0, 0.0));
    }

    #[test]
    fn symmetric_case_splits_in_half() {
        let dp = params(1.3, 1.3, 0.4, 0.4);
        for (u, v) in [(1.0, 0.0), (2.5, 0.7), (0.01, 3.0)] {
            let p = dds_partition(&dp, &affine(), u, v).unwrap();
            assert!((p.u_b - 0.5 * u).abs() < 1e-13 * u.max(1.0));
            assert!((p.u_a + p.u_b - u).abs() <= 1e-12 * u.max(1.0));
            let parts = dds_partials(&dp, &affine(), u, v).unwrap();
            assert!((parts.du_b_du - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn affine_equal_weights_is_linear_in_ub() {
        // a = b: quadratic terms cancel, F(u_b) = 4 u_b - 2 at u = 1, v = 0
        let dp = params(1.0, 1.0, 0.0, 1.0);
        let p = dds_partition(&dp, &affine(), 1.0, 0.0).unwrap();
        let oracle = bisect_partition(&dp, &affine(), 1.0, 0.0);
        assert!((oracle - 0.5).abs() < 1e-14);
        assert!((p.u_b - oracle).abs() < 1e-14);
    }

    #[test]
    fn affine_quadratic_witness() {
        // a = 2, b = d = 1, c = 0, u = 1, v = 0:  (1+x)x = (3-2x)(1-x)  =>  x^2 - 6x + 3 = 0
        let dp = params(2.0, 1.0, 0.0, 1.0);
        let oracle = bisect_partition(&dp, &affine(), 1.0, 0.0);
        let exact = 3.0 - 6f64.sqrt();
        assert!((oracle - exact).abs() < 1e-14);
        let p = dds_partition(&dp, &affine(), 1.0, 0.0).unwrap();
        assert!((p.u_b - exact).abs() < 1e-14);
        assert!(p.iterations <= 6, "{} iterations", p.iterations);
    }

    #[test]
    fn c_zero_gives_nonpositive_dv() {
        let dp = params(1.5, 0.7, 0.0, 2.0);
        for (u, v) in [(0.3, 0.2), (1.0, 1.0), (4.0, 0.1)] {
            assert!(dds_partials(&dp, &affine(), u, v).unwrap().du_b_dv <= 0.0);
        }
    }

    #[test]
    fn equal_diffusivities_have_no_cross_diffusion() {
        let dp = DdsParams {
            d_a: 2.0,
            d_b: 2.0,
            ..params(1.0, 2.0, 0.5, 1.0)
        };
        let (u, v) = (1.7, 0.4);
        assert!((d_dds(&dp, &affine(), u, v).unwrap() - 2.0 * u).abs() < 1e-14);
        assert_eq!(grad_d_dds(&dp, &affine(), u, v).unwrap().1, 0.0);
    }

    #[test]
    fn symmetric_grad_is_mean_diffusivity() {
        let dp = params(1.0, 1.0, 0.3, 0.3);
        let (d1, _) = grad_d_dds(&dp, &affine(), 2.0, 1.0).unwrap();
        assert!((d1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn warm_start_agrees_with_cold_start() {
        let dp = params(0.8, 1.4, 0.6, 0.9);
        let rates = TransitionRates::PowerLaw {
            h0: 0.5,
            k0: 0.2,
            alpha: 0.7,
            beta: 1.6,
        };
        let cold = dds_partition(&dp, &rates, 2.0, 1.5).unwrap();
        let warm = dds_partition_from(&dp, &rates, 2.0, 1.5, Some(cold.u_b * 1.01)).unwrap();
        assert!((cold.u_b - warm.u_b).abs() < 1e-13);
    }

    #[test]
    fn negative_density_rejected() {
        assert!(dds_partition(&params(1.0, 1.0, 0.0, 1.0), &affine(), -1.0, 0.0).is_err());
    }
}

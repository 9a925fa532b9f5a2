//! The stiff `1/ε` exchange between the two sub-states, advanced on its own.
//!
//! Over an exchange substep `v` is frozen and `u = u_a + u_b` is invariant,
//! so only `u_b` needs updating and `u_a = u - u_b` conserves the sum.

use crate::diffusivity::{dds, DdsParams, TransitionRates};
use crate::error::{Error, Result};
use crate::roots::{newton_bisect, RootOptions};

/// Relaxation `u_b -> phi u + (u_b - phi u) exp(-(h + k) dt / ε)` of the linear exchange.
pub(crate) fn exchange_skt(rates: &TransitionRates, epsilon: f64, y: &mut [f64], n: usize, dt: f64, neg_tol: f64) -> Result<()> {
    let (lo, hi) = rates.domain();
    for i in 0..n {
        let v = y[2 * n + i];
        let arg = if v < lo && v >= lo - neg_tol {
            lo
        } else if v > hi && v <= hi + neg_tol {
            hi
        } else {
            v
        };
        let r = rates.eval(arg)?;
        let rate = r.h + r.k;
        let u = y[i] + y[n + i];
        let target = r.h / rate * u;
        let ub = target + (y[n + i] - target) * (-rate * dt / epsilon).exp();
        y[n + i] = ub;
        y[i] = u - ub;
    }
    Ok(())
}

/// Number of implicit-midpoint substeps so that each is at most `ε/4`.
pub(crate) fn dds_substeps(dt: f64, epsilon: f64) -> usize {
    ((dt / (0.25 * epsilon)).ceil() as usize).max(1)
}

/// Implicit midpoint on `u_b' = -Q(u - u_b, u_b, v) / ε`.
///
/// The midpoint `m` solves `m - u_b + τ/(2ε) Q(u - m, m, v) = 0`, which is
/// increasing in `m` and changes sign on `[0, u]`. Besides `τ <= ε/4`, each
/// point also keeps `τ |dQ/du_b| <= ε` so that the midpoint map damps.
pub(crate) fn exchange_dds(dp: &DdsParams, rates: &TransitionRates, epsilon: f64, y: &mut [f64], n: usize, dt: f64, neg_tol: f64) -> Result<()> {
    let base_steps = dds_substeps(dt, epsilon);
    for i in 0..n {
        let u = y[i] + y[n + i];
        let v = y[2 * n + i];
        let v = if v < 0.0 && v >= -neg_tol { 0.0 } else { v };
        if u <= 0.0 {
            if u < -neg_tol {
                return Err(Error::Domain {
                    what: "exchange density",
                    value: u,
                    lo: 0.0,
                    hi: f64::INFINITY,
                });
            }
            continue;
        }
        for w in [dp.c * v, dp.a * u + dp.c * v, dp.d * v, dp.b * u + dp.d * v] {
            rates.eval(w)?;
        }
        let mut ub = y[n + i].clamp(0.0, u);
        let stiff = q_and_slope(dp, rates, u, ub, v).1 * dt / epsilon;
        let steps = base_steps.max(stiff.ceil() as usize);
        let tau = dt / steps as f64;
        let c = 0.5 * tau / epsilon;
        let scale = dds::partition_scale(dp, rates, u, v)?;
        let opts = RootOptions {
            f_tol: 1e-14 * u.max(c * scale),
            max_iter: 100,
        };
        for _ in 0..steps {
            let ub0 = ub;
            let g = |m: f64| {
                let (q, dq) = q_and_slope(dp, rates, u, m, v);
                (m - ub0 + c * q, 1.0 + c * dq)
            };
            let root = newton_bisect(g, 0.0, u, ub0, opts).map_err(|_| Error::NonConvergence {
                what: "exchange substep",
                iterations: 100,
                index: Some(i),
            })?;
            ub = 2.0 * root.x - ub0;
        }
        y[n + i] = ub;
        y[i] = u - ub;
    }
    Ok(())
}

/// `Q(u - m, m, v)` and its derivative in `m`; arguments are pre-checked by the caller.
fn q_and_slope(dp: &DdsParams, rates: &TransitionRates, u: f64, m: f64, v: f64) -> (f64, f64) {
    let ua = u - m;
    let rh = rates.eval(dp.a * ua + dp.c * v).expect("argument inside checked range");
    let rk = rates.eval(dp.b * m + dp.d * v).expect("argument inside checked range");
    let q = rk.k * m - rh.h * ua;
    let dq = rk.k + dp.b * m * rk.dk + rh.h + dp.a * ua * rh.dh;
    (q, dq)
}

//! Method-of-lines right-hand side and its block-tridiagonal Jacobian.
//!
//! States are stored field-major: field `k` at cell `i` is `y[k * n + i]`.

use super::blocks::BlockTri;
use super::grid::{laplacian_diag, neumann_laplacian_into};
use crate::diffusivity::{self, dds, DdsParams, TransitionRates};
use crate::error::{Error, Result};
use crate::kinetics::ReactionParams;
use crate::model::{Family, ModelSpec};

#[derive(Debug, Clone, Copy)]
enum Kernel {
    /// `D = u (d_u + sign d12 phi(v))`.
    Skt {
        signed_d12: f64,
    },
    Dds(DdsParams),
    /// Three-field system without the exchange term.
    Fast {
        d_a: f64,
        d_b: f64,
    },
}

pub(crate) struct Rhs {
    kernel: Kernel,
    params: ReactionParams,
    rates: TransitionRates,
    pub(crate) n: usize,
    pub(crate) m: usize,
    dx: f64,
    reactions: bool,
    /// Densities above `-neg_tol` are treated as zero where rate arguments need it.
    neg_tol: f64,
    w: Vec<f64>,
    lap: Vec<f64>,
    /// Previous partition per cell, used to warm-start the DDS solve.
    ub_cache: Vec<f64>,
    d1: Vec<f64>,
    d2: Vec<f64>,
}

impl Rhs {
    pub(crate) fn new(model: &ModelSpec, n: usize, dx: f64, reactions: bool, neg_tol: f64) -> Result<Self> {
        let kernel = if model.is_fast() {
            let (d_a, d_b) = model.substate_diffusion();
            Kernel::Fast { d_a, d_b }
        } else {
            match model.family() {
                Family::Avoidance => Kernel::Skt {
                    signed_d12: model.params.d12,
                },
                Family::Hiding => Kernel::Skt {
                    signed_d12: -model.params.d12,
                },
                Family::Starvation => Kernel::Dds(*model.dds_params()?),
            }
        };
        let m = model.field_names().len();
        Ok(Self {
            kernel,
            params: model.params,
            rates: model.rates.clone(),
            n,
            m,
            dx,
            reactions,
            neg_tol,
            w: vec![0.0; n],
            lap: vec![0.0; n],
            ub_cache: vec![f64::NAN; n],
            d1: vec![0.0; n],
            d2: vec![0.0; n],
        })
    }

    fn clamp_nonneg(&self, x: f64) -> f64 {
        if x < 0.0 && x >= -self.neg_tol {
            0.0
        } else {
            x
        }
    }

    /// Rate argument pulled back into the family's domain when it overshoots by round-off only.
    fn rate_arg(&self, v: f64) -> f64 {
        let (lo, hi) = self.rates.domain();
        if v < lo && v >= lo - self.neg_tol {
            lo
        } else if v > hi && v <= hi + self.neg_tol {
            hi
        } else {
            v
        }
    }

    fn partition(&mut self, dp: &DdsParams, i: usize, u: f64, v: f64) -> Result<dds::Partition> {
        let (u, v) = (self.clamp_nonneg(u), self.clamp_nonneg(v));
        let guess = self.ub_cache[i];
        let part = dds::dds_partition_from(dp, &self.rates, u, v, Some(guess).filter(|g| g.is_finite())).map_err(|e| match e {
            Error::NonConvergence { what, iterations, .. } => Error::NonConvergence {
                what,
                iterations,
                index: Some(i),
            },
            other => other,
        })?;
        self.ub_cache[i] = part.u_b;
        Ok(part)
    }

    /// Largest `max(d1 D, d_v)` over the grid, for the explicit step limit.
    pub(crate) fn max_effective_diffusivity(&self, y: &[f64]) -> Result<f64> {
        let n = self.n;
        let d_v = self.params.d_v;
        Ok(match self.kernel {
            Kernel::Skt { signed_d12 } => {
                let mut dmax = d_v;
                for i in 0..n {
                    let phi = diffusivity::phi(&self.rates, self.rate_arg(y[n + i]))?;
                    dmax = dmax.max(self.params.d_u + signed_d12 * phi);
                }
                dmax
            }
            // d1 D = d_a + (d_b - d_a) d1 u_b with d1 u_b in (0, 1)
            Kernel::Dds(dp) => dp.d_a.max(dp.d_b).max(d_v),
            Kernel::Fast { d_a, d_b } => d_a.max(d_b).max(d_v),
        })
    }

    pub(crate) fn eval(&mut self, y: &[f64], out: &mut [f64]) -> Result<()> {
        let n = self.n;
        debug_assert_eq!(y.len(), self.m * n);
        let p = self.params;
        match self.kernel {
            Kernel::Skt { signed_d12 } => {
                let (u, v) = y.split_at(n);
                for i in 0..n {
                    let phi = diffusivity::phi(&self.rates, self.rate_arg(v[i]))?;
                    self.w[i] = u[i] * (p.d_u + signed_d12 * phi);
                }
                self.limit_tail(y, out);
            }
            Kernel::Dds(dp) => {
                for i in 0..n {
                    let part = self.partition(&dp, i, y[i], y[n + i])?;
                    self.w[i] = dp.d_a * part.u_a + dp.d_b * part.u_b;
                }
                self.limit_tail(y, out);
            }
            Kernel::Fast { d_a, d_b } => {
                for (k, dk) in [d_a, d_b, p.d_v].into_iter().enumerate() {
                    let f = &y[k * n..(k + 1) * n];
                    neumann_laplacian_into(f, self.dx, &mut self.lap);
                    for (o, l) in out[k * n..(k + 1) * n].iter_mut().zip(&self.lap) {
                        *o = dk * l;
                    }
                }
                if self.reactions {
                    for i in 0..n {
                        let (ua, ub, v) = (y[i], y[n + i], y[2 * n + i]);
                        let growth = p.r_u - p.r11 * (ua + ub) - p.r12 * v;
                        out[i] += ua * growth;
                        out[n + i] += ub * growth;
                        out[2 * n + i] += v * (p.r_v - p.r21 * (ua + ub) - p.r22 * v);
                    }
                }
            }
        }
        Ok(())
    }

    /// Shared part of the limit systems once the composite `w = D(u, v)` is filled in.
    fn limit_tail(&mut self, y: &[f64], out: &mut [f64]) {
        let n = self.n;
        let p = self.params;
        let (u, v) = y.split_at(n);
        let (out_u, out_v) = out.split_at_mut(n);
        neumann_laplacian_into(&self.w, self.dx, out_u);
        neumann_laplacian_into(v, self.dx, &mut self.lap);
        for (o, l) in out_v.iter_mut().zip(&self.lap) {
            *o = p.d_v * l;
        }
        if self.reactions {
            for i in 0..n {
                let (f, g) = p.reaction(u[i], v[i]);
                out_u[i] += f;
                out_v[i] += g;
            }
        }
    }

    /// Jacobian of [`Rhs::eval`] at `y` as `M×M` blocks in cell order.
    pub(crate) fn jacobian<const M: usize>(&mut self, y: &[f64], jac: &mut BlockTri<M>) -> Result<()> {
        assert_eq!(M, self.m, "block size must match the number of fields");
        let n = self.n;
        let p = self.params;
        let s = 1.0 / (self.dx * self.dx);
        let mut diag_d = [0.0; M];
        match self.kernel {
            Kernel::Skt { signed_d12 } => {
                for i in 0..n {
                    let (u, v) = (y[i], self.rate_arg(y[n + i]));
                    let phi = diffusivity::phi(&self.rates, v)?;
                    let dphi = diffusivity::phi_prime(&self.rates, v)?;
                    self.d1[i] = p.d_u + signed_d12 * phi;
                    self.d2[i] = signed_d12 * u * dphi;
                }
            }
            Kernel::Dds(dp) => {
                for i in 0..n {
                    let v = self.clamp_nonneg(y[n + i]);
                    let part = self.partition(&dp, i, y[i], v)?;
                    let partials = dds::partials_at(&dp, &self.rates, &part, v)?;
                    let (d1, d2) = dds::grad_from_partials(&dp, &partials);
                    self.d1[i] = d1;
                    self.d2[i] = d2;
                }
            }
            Kernel::Fast { d_a, d_b } => {
                diag_d[0] = d_a;
                diag_d[1] = d_b;
                diag_d[2] = p.d_v;
            }
        }
        let fast = matches!(self.kernel, Kernel::Fast { .. });
        for i in 0..n {
            let lii = laplacian_diag(i, n) * s;
            let mut d = [[0.0; M]; M];
            if fast {
                for k in 0..M {
                    d[k][k] = diag_d[k] * lii;
                }
                if self.reactions {
                    let (ua, ub, v) = (y[i], y[n + i], y[2 * n + i]);
                    let growth = p.r_u - p.r11 * (ua + ub) - p.r12 * v;
                    d[0][0] += growth - p.r11 * ua;
                    d[0][1] += -p.r11 * ua;
                    d[0][2] += -p.r12 * ua;
                    d[1][0] += -p.r11 * ub;
                    d[1][1] += growth - p.r11 * ub;
                    d[1][2] += -p.r12 * ub;
                    d[2][0] += -p.r21 * v;
                    d[2][1] += -p.r21 * v;
                    d[2][2] += p.r_v - p.r21 * (ua + ub) - 2.0 * p.r22 * v;
                }
            } else {
                d[0][0] = self.d1[i] * lii;
                d[0][1] = self.d2[i] * lii;
                d[1][1] = p.d_v * lii;
                if self.reactions {
                    let j = p.jacobian(y[i], y[n + i]).0;
                    d[0][0] += j[0][0];
                    d[0][1] += j[0][1];
                    d[1][0] += j[1][0];
                    d[1][1] += j[1][1];
                }
            }
            jac.diag[i] = d;
        }
        let coupling = |j: usize| {
            let mut b = [[0.0; M]; M];
            if fast {
                for k in 0..M {
                    b[k][k] = diag_d[k] * s;
                }
            } else {
                b[0][0] = self.d1[j] * s;
                b[0][1] = self.d2[j] * s;
                b[1][1] = p.d_v * s;
            }
            b
        };
        for i in 1..n {
            jac.lower[i] = coupling(i - 1);
        }
        for i in 0..n - 1 {
            jac.upper[i] = coupling(i + 1);
        }
        Ok(())
    }
}

//! Safeguarded Newton iteration for increasing scalar functions.
//!
//! Every implicit solve in this crate is a monotone scalar equation on a
//! known bracket, so a Newton step is taken when it stays inside the
//! bracket and reduces the residual, and a bisection step otherwise.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RootOptions {
    /// Absolute residual tolerance on |f(x)|.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self { f_tol: 1e-12, max_iter: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Solve `f(x) = 0` for `f` non-decreasing on `[lo, hi]` with `f(lo) <= 0 <= f(hi)`.
///
/// `f` returns the value and derivative. The iteration stops when the
/// residual is below `f_tol` or the bracket has shrunk to adjacent floats.
pub fn newton_bisect<F>(mut f: F, lo: f64, hi: f64, x0: f64, opts: RootOptions) -> Result<Root>
where
    F: FnMut(f64) -> (f64, f64),
{
    debug_assert!(lo <= hi);
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, _) = f(lo);
    if f_lo.abs() <= opts.f_tol {
        return Ok(Root {
            x: lo,
            residual: f_lo.abs(),
            iterations: 0,
        });
    }
    let (f_hi, _) = f(hi);
    if f_hi.abs() <= opts.f_tol {
        return Ok(Root {
            x: hi,
            residual: f_hi.abs(),
            iterations: 0,
        });
    }

    let mut x = x0.clamp(lo, hi);
    let (mut fx, mut dfx) = f(x);
    let mut best = (x, fx.abs());

    for it in 1..=opts.max_iter {
        if fx.abs() <= opts.f_tol {
            return Ok(Root {
                x,
                residual: fx.abs(),
                iterations: it - 1,
            });
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE) {
            return Ok(Root {
                x: best.0,
                residual: best.1,
                iterations: it,
            });
        }

        let newton = x - fx / dfx;
        let mut next = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let (mut fn_, mut dfn) = f(next);
        // Newton overshoot that fails to halve the residual: fall back to bisection.
        if fn_.abs() > 0.5 * fx.abs() && next != 0.5 * (lo + hi) {
            if fn_ < 0.0 {
                lo = lo.max(next);
            } else {
                hi = hi.min(next);
            }
            next = 0.5 * (lo + hi);
            (fn_, dfn) = f(next);
        }
        x = next;
        fx = fn_;
        dfx = dfn;
        if fx.abs() < best.1 {
            best = (x, fx.abs());
        }
    }
    if fx.abs() <= opts.f_tol {
        return Ok(Root {
            x,
            residual: fx.abs(),
            iterations: opts.max_iter,
        });
    }
    Err(Error::NonConvergence {
        what: "safeguarded Newton",
        iterations: opts.max_iter,
        index: None,
    })
}

/// Roots of `a x^2 + b x + c` in ascending order, computed without cancellation.
///
/// Returns `None` when the discriminant is negative or `a == 0`.
pub fn quadratic_roots(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    if a == 0.0 {
        return None;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    if q == 0.0 {
        return Some((0.0, 0.0));
    }
    let (r1, r2) = (q / a, c / q);
    Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

//! One-step integrators for the non-stiff part.

use super::blocks::{BlockLu, BlockTri};
use super::rhs::Rhs;
use crate::error::{Error, Result};

pub(crate) struct Rk4 {
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
}

impl Rk4 {
    pub fn new(len: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; len]),
            tmp: vec![0.0; len],
        }
    }

    pub fn step(&mut self, rhs: &mut Rhs, y: &mut [f64], dt: f64) -> Result<()> {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        rhs.eval(y, k1)?;
        for j in 0..y.len() {
            tmp[j] = y[j] + 0.5 * dt * k1[j];
        }
        rhs.eval(tmp, k2)?;
        for j in 0..y.len() {
            tmp[j] = y[j] + 0.5 * dt * k2[j];
        }
        rhs.eval(tmp, k3)?;
        for j in 0..y.len() {
            tmp[j] = y[j] + dt * k3[j];
        }
        rhs.eval(tmp, k4)?;
        for j in 0..y.len() {
            y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        Ok(())
    }
}

/// `γ = 1 - 1/√2` of the two-stage, L-stable, stiffly accurate SDIRK method.
pub(crate) const SDIRK_GAMMA: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

/// Two-stage SDIRK with simplified Newton: one Jacobian and one block factorisation per step.
pub(crate) struct Sdirk<const M: usize> {
    jac: BlockTri<M>,
    mat: BlockTri<M>,
    lu: BlockLu<M>,
    stage: Vec<f64>,
    k1: Vec<f64>,
    base: Vec<f64>,
    f: Vec<f64>,
    r: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl<const M: usize> Sdirk<M> {
    pub fn new(n: usize, tol: f64, max_iter: usize) -> Self {
        let len = M * n;
        Self {
            jac: BlockTri::new(n),
            mat: BlockTri::new(n),
            lu: BlockLu::new(n),
            stage: vec![0.0; len],
            k1: vec![0.0; len],
            base: vec![0.0; len],
            f: vec![0.0; len],
            r: vec![0.0; len],
            tol,
            max_iter,
        }
    }

    /// Advance `y` by `dt`; on error `y` is left untouched. Returns the Newton iteration count.
    pub fn step(&mut self, rhs: &mut Rhs, y: &mut [f64], dt: f64) -> Result<usize> {
        let g = SDIRK_GAMMA * dt;
        rhs.jacobian(y, &mut self.jac)?;
        let n = self.jac.len();
        for i in 0..n {
            for r in 0..M {
                for c in 0..M {
                    let id = if r == c { 1.0 } else { 0.0 };
                    self.mat.diag[i][r][c] = id - g * self.jac.diag[i][r][c];
                    self.mat.lower[i][r][c] = -g * self.jac.lower[i][r][c];
                    self.mat.upper[i][r][c] = -g * self.jac.upper[i][r][c];
                }
            }
        }
        self.lu.factor(&self.mat)?;

        // stage 1: Y1 = y + g F(Y1)
        self.base.copy_from_slice(y);
        self.stage.copy_from_slice(y);
        let mut iters = self.solve_stage(rhs, g)?;
        for j in 0..y.len() {
            self.k1[j] = (self.stage[j] - y[j]) / g;
        }
        // stage 2: Y2 = y + (1 - γ) dt K1 + g F(Y2)
        let b = (1.0 - SDIRK_GAMMA) * dt;
        for j in 0..y.len() {
            self.base[j] = y[j] + b * self.k1[j];
            self.stage[j] = y[j] + dt * self.k1[j];
        }
        iters += self.solve_stage(rhs, g)?;
        y.copy_from_slice(&self.stage);
        Ok(iters)
    }

    fn solve_stage(&mut self, rhs: &mut Rhs, g: f64) -> Result<usize> {
        let mut prev = f64::INFINITY;
        for it in 1..=self.max_iter {
            rhs.eval(&self.stage, &mut self.f)?;
            for j in 0..self.r.len() {
                self.r[j] = self.base[j] + g * self.f[j] - self.stage[j];
            }
            self.lu.solve(&mut self.r);
            let mut dmax = 0.0f64;
            let mut ymax = 0.0f64;
            for (s, d) in self.stage.iter_mut().zip(&self.r) {
                *s += d;
                dmax = dmax.max(d.abs());
                ymax = ymax.max(s.abs());
            }
            if !dmax.is_finite() {
                break;
            }
            if dmax <= self.tol * ymax.max(1.0) {
                return Ok(it);
            }
            if it >= 3 && dmax > 0.9 * prev {
                break;
            }
            prev = dmax;
        }
        Err(Error::NonConvergence {
            what: "implicit stage",
            iterations: self.max_iter,
            index: None,
        })
    }
}

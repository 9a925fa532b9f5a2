use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_CELLS: usize = 8;

/// Uniform cell-centred grid on `[0, L]`: `x_i = (i + 1/2) dx`, `dx = L/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub length: f64,
    pub cells: usize,
}

impl Grid1D {
    pub fn new(length: f64, cells: usize) -> Result<Self> {
        let g = Self { length, cells };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(Error::invalid("grid.length", format!("must be finite and > 0, got {}", self.length)));
        }
        if self.cells < MIN_CELLS {
            return Err(Error::invalid(
                "grid.cells",
                format!("need at least {MIN_CELLS} cells, got {}", self.cells),
            ));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        self.length / self.cells as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.cells).map(|i| self.x(i)).collect()
    }
}

/// Zero-flux Laplacian on a cell-centred grid.
///
/// The ghost values mirror the boundary cell across the wall
/// (`w_{-1} = w_0`, `w_N = w_{N-1}`), which puts the zero-gradient condition
/// exactly at `x = 0` and `x = L`. The operator is symmetric, so the discrete
/// sum of `Δw` vanishes, and `cos(nπx/L)` sampled at the centres is an exact
/// eigenvector with eigenvalue `-(2/dx sin(nπ dx / 2L))²`.
pub fn neumann_laplacian(w: &[f64], dx: f64) -> Vec<f64> {
    let mut out = vec![0.0; w.len()];
    neumann_laplacian_into(w, dx, &mut out);
    out
}

pub fn neumann_laplacian_into(w: &[f64], dx: f64, out: &mut [f64]) {
    let n = w.len();
    assert!(n >= 3, "Laplacian needs at least three cells");
    assert_eq!(out.len(), n);
    let s = 1.0 / (dx * dx);
    out[0] = (w[1] - w[0]) * s;
    for i in 1..n - 1 {
        out[i] = (w[i - 1] - 2.0 * w[i] + w[i + 1]) * s;
    }
    out[n - 1] = (w[n - 2] - w[n - 1]) * s;
}

/// Diagonal entry of row `i` of the Laplacian matrix times `dx²`; neighbours carry `+1`.
pub(crate) fn laplacian_diag(i: usize, n: usize) -> f64 {
    if i == 0 || i == n - 1 {
        -1.0
    } else {
        -2.0
    }
}

/// Exact eigenvalue of the discrete operator on mode `n`.
pub fn discrete_eigenvalue(grid: &Grid1D, n: usize) -> f64 {
    let dx = grid.dx();
    let s = (n as f64 * std::f64::consts::PI * dx / (2.0 * grid.length)).sin();
    -(2.0 * s / dx).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn grid_rejects_small() {
        assert!(Grid1D::new(1.0, 7).is_err());
        assert!(Grid1D::new(0.0, 16).is_err());
        let g = Grid1D::new(10.0, 8).unwrap();
        assert_eq!(g.x(0), 0.625);
        assert_eq!(g.centers().len(), 8);
    }

    #[test]
    fn constants_are_annihilated() {
        let lap = neumann_laplacian(&[3.7; 17], 0.1);
        assert!(lap.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn cosine_is_eigenvector() {
        let g = Grid1D::new(10.0, 64).unwrap();
        for n in [1, 3, 10] {
            let w: Vec<f64> = g.centers().iter().map(|x| (n as f64 * PI * x / g.length).cos()).collect();
            let lap = neumann_laplacian(&w, g.dx());
            let mu = discrete_eigenvalue(&g, n);
            for (a, b) in lap.iter().zip(&w) {
                assert!((a - mu * b).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn sum_vanishes() {
        let w: Vec<f64> = (0..33).map(|i| ((i * 7919) % 31) as f64 * 0.1).collect();
        let s: f64 = neumann_laplacian(&w, 0.3).iter().sum();
        assert!(s.abs() < 1e-12);
    }
}

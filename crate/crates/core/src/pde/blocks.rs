//! Block-tridiagonal linear algebra for the implicit stepper.
//!
//! Blocks are `M×M` (two fields for limit systems, three for fast systems),
//! so each pivot block is factored with a small dense LU.

use crate::error::{Error, Result};

pub(crate) type Block<const M: usize> = [[f64; M]; M];

/// Row `i` couples cell `i` to `i-1` through `lower[i]` and to `i+1` through `upper[i]`.
#[derive(Debug, Clone)]
pub(crate) struct BlockTri<const M: usize> {
    pub diag: Vec<Block<M>>,
    pub lower: Vec<Block<M>>,
    pub upper: Vec<Block<M>>,
}

impl<const M: usize> BlockTri<M> {
    pub fn new(n: usize) -> Self {
        let z = [[0.0; M]; M];
        Self {
            diag: vec![z; n],
            lower: vec![z; n],
            upper: vec![z; n],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    /// Dense matrix in the field-major ordering used for states.
    #[cfg(test)]
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let mut a = vec![vec![0.0; M * n]; M * n];
        for i in 0..n {
            for r in 0..M {
                for c in 0..M {
                    a[r * n + i][c * n + i] = self.diag[i][r][c];
                    if i > 0 {
                        a[r * n + i][c * n + i - 1] = self.lower[i][r][c];
                    }
                    if i + 1 < n {
                        a[r * n + i][c * n + i + 1] = self.upper[i][r][c];
                    }
                }
            }
        }
        a
    }
}

/// Dense LU with partial pivoting, in place.
fn lu_factor<const M: usize>(a: &mut Block<M>) -> Result<[usize; M]> {
    let mut piv = [0; M];
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    for k in 0..M {
        let p = (k..M).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        if !(a[p][k].abs() > 1e-300 + 1e-15 * scale) {
            return Err(Error::NonConvergence {
                what: "block factorisation (singular pivot)",
                iterations: 0,
                index: None,
            });
        }
        piv[k] = p;
        a.swap(k, p);
        for i in k + 1..M {
            let f = a[i][k] / a[k][k];
            a[i][k] = f;
            for j in k + 1..M {
                a[i][j] -= f * a[k][j];
            }
        }
    }
    Ok(piv)
}

fn lu_solve<const M: usize>(lu: &Block<M>, piv: &[usize; M], b: &mut [f64; M]) {
    for k in 0..M {
        b.swap(k, piv[k]);
    }
    for i in 1..M {
        for j in 0..i {
            b[i] -= lu[i][j] * b[j];
        }
    }
    for i in (0..M).rev() {
        for j in i + 1..M {
            b[i] -= lu[i][j] * b[j];
        }
        b[i] /= lu[i][i];
    }
}

fn mat_vec<const M: usize>(a: &Block<M>, x: &[f64; M]) -> [f64; M] {
    let mut y = [0.0; M];
    for r in 0..M {
        for c in 0..M {
            y[r] += a[r][c] * x[c];
        }
    }
    y
}

/// Block Thomas factorisation of a block-tridiagonal matrix.
#[derive(Debug, Clone)]
pub(crate) struct BlockLu<const M: usize> {
    lu: Vec<Block<M>>,
    piv: Vec<[usize; M]>,
    /// `D'_i^{-1} U_i`.
    c: Vec<Block<M>>,
    lower: Vec<Block<M>>,
    work: Vec<[f64; M]>,
}

impl<const M: usize> BlockLu<M> {
    pub fn new(n: usize) -> Self {
        let z = [[0.0; M]; M];
        Self {
            lu: vec![z; n],
            piv: vec![[0; M]; n],
            c: vec![z; n],
            lower: vec![z; n],
            work: vec![[0.0; M]; n],
        }
    }

    pub fn factor(&mut self, a: &BlockTri<M>) -> Result<()> {
        let n = a.len();
        for i in 0..n {
            let mut d = a.diag[i];
            if i > 0 {
                // D'_i = D_i - L_i C_{i-1}
                let l = &a.lower[i];
                let cp = &self.c[i - 1];
                for r in 0..M {
                    for col in 0..M {
                        let mut s = 0.0;
                        for k in 0..M {
                            s += l[r][k] * cp[k][col];
                        }
                        d[r][col] -= s;
                    }
                }
            }
            let piv = lu_factor(&mut d).map_err(|e| match e {
                Error::NonConvergence { what, iterations, .. } => Error::NonConvergence {
                    what,
                    iterations,
                    index: Some(i),
                },
                other => other,
            })?;
            self.lu[i] = d;
            self.piv[i] = piv;
            self.lower[i] = a.lower[i];
            if i + 1 < n {
                let u = &a.upper[i];
                let mut c = [[0.0; M]; M];
                for col in 0..M {
                    let mut x = [0.0; M];
                    for r in 0..M {
                        x[r] = u[r][col];
                    }
                    lu_solve(&self.lu[i], &self.piv[i], &mut x);
                    for r in 0..M {
                        c[r][col] = x[r];
                    }
                }
                self.c[i] = c;
            }
        }
        Ok(())
    }

    /// Solve in place; `rhs` is field-major like the state vectors.
    pub fn solve(&mut self, rhs: &mut [f64]) {
        let n = self.lu.len();
        debug_assert_eq!(rhs.len(), M * n);
        for i in 0..n {
            let mut b = [0.0; M];
            for k in 0..M {
                b[k] = rhs[k * n + i];
            }
            if i > 0 {
                let lb = mat_vec(&self.lower[i], &self.work[i - 1]);
                for k in 0..M {
                    b[k] -= lb[k];
                }
            }
            lu_solve(&self.lu[i], &self.piv[i], &mut b);
            self.work[i] = b;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            let cx = mat_vec(&self.c[i], &self.work[i + 1]);
            for k in 0..M {
                self.work[i][k] -= cx[k];
            }
        }
        for i in 0..n {
            for k in 0..M {
                rhs[k * n + i] = self.work[i][k];
            }
        }
    }
}

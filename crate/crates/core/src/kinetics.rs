//! Lotka–Volterra competition kinetics: regimes, equilibria and their stability.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance under which a ratio equality puts parameters on a regime boundary.
pub const REGIME_BOUNDARY_TOL: f64 = 1e-12;
/// Relative tolerance for calling an eigenvalue real part zero.
pub const MARGINAL_TOL: f64 = 1e-12;

/// Growth, competition and diffusion coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReactionParams {
    pub r_u: f64,
    pub r_v: f64,
    pub r11: f64,
    pub r12: f64,
    pub r21: f64,
    pub r22: f64,
    pub d_u: f64,
    pub d_v: f64,
    #[serde(default)]
    pub d12: f64,
}

impl ReactionParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("r_u", self.r_u),
            ("r_v", self.r_v),
            ("r11", self.r11),
            ("r12", self.r12),
            ("r21", self.r21),
            ("r22", self.r22),
            ("d_u", self.d_u),
            ("d_v", self.d_v),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, format!("must be finite and > 0, got {value}")));
            }
        }
        if !(self.d12.is_finite() && self.d12 >= 0.0) {
            return Err(Error::invalid("d12", format!("must be finite and >= 0, got {}", self.d12)));
        }
        Ok(())
    }

    pub fn with_d12(mut self, d12: f64) -> Self {
        self.d12 = d12;
        self
    }

    /// Kinetic invariants `(R, S, T)`.
    pub fn rst(&self) -> (f64, f64, f64) {
        (
            self.r11 * self.r22 - self.r12 * self.r21,
            self.r_v * self.r11 - self.r_u * self.r21,
            self.r_u * self.r22 - self.r_v * self.r12,
        )
    }

    /// Reaction rates `(f, g)` at `(u, v)`.
    pub fn reaction(&self, u: f64, v: f64) -> (f64, f64) {
        (u * (self.r_u - self.r11 * u - self.r12 * v), v * (self.r_v - self.r21 * u - self.r22 * v))
    }

    pub fn jacobian(&self, u: f64, v: f64) -> Mat2 {
        Mat2([
            [self.r_u - 2.0 * self.r11 * u - self.r12 * v, -self.r12 * u],
            [-self.r21 * v, self.r_v - self.r21 * u - 2.0 * self.r22 * v],
        ])
    }

    pub fn classify_regime(&self) -> RegimeClass {
        let (r, s, t) = self.rst();
        // S > 0  <=>  r_u/r_v < r11/r21 ;  T > 0  <=>  r12/r22 < r_u/r_v
        let s_scale = (self.r_v * self.r11).max(self.r_u * self.r21);
        let t_scale = (self.r_u * self.r22).max(self.r_v * self.r12);
        let on_boundary = s.abs() <= REGIME_BOUNDARY_TOL * s_scale || t.abs() <= REGIME_BOUNDARY_TOL * t_scale;
        let regime = if on_boundary {
            Regime::NoCoexistence
        } else if s > 0.0 && t > 0.0 {
            Regime::Weak
        } else if s < 0.0 && t < 0.0 {
            Regime::Strong
        } else {
            Regime::NoCoexistence
        };
        RegimeClass { regime, r, s, t }
    }

    /// Coexistence state `(T/R, S/R)`, when the regime admits one.
    pub fn coexistence(&self) -> Result<(f64, f64)> {
        let class = self.classify_regime();
        match class.regime {
            Regime::Weak | Regime::Strong => Ok((class.t / class.r, class.s / class.r)),
            Regime::NoCoexistence => Err(Error::NoCoexistence(class.regime)),
        }
    }

    /// Coexistence state, insisting on the weak competition regime.
    pub fn weak_coexistence(&self, operation: &'static str) -> Result<(f64, f64)> {
        let regime = self.classify_regime().regime;
        if regime != Regime::Weak {
            return Err(Error::Regime {
                operation,
                required: Regime::Weak,
                found: regime,
            });
        }
        self.coexistence()
    }

    /// Homogeneous steady states with their stability for the reaction ODE.
    pub fn equilibria(&self) -> Vec<Equilibrium> {
        let mut out = vec![
            (0.0, 0.0, EquilibriumKind::Trivial),
            (self.r_u / self.r11, 0.0, EquilibriumKind::SemiTrivialU),
            (0.0, self.r_v / self.r22, EquilibriumKind::SemiTrivialV),
        ];
        if let Ok((u, v)) = self.coexistence() {
            out.push((u, v, EquilibriumKind::Coexistence));
        }
        out.into_iter()
            .map(|(u, v, kind)| Equilibrium {
                u,
                v,
                kind,
                stability: self.stability_at(u, v),
            })
            .collect()
    }

    pub fn classify_equilibrium(&self, eq: &Equilibrium) -> Stability {
        self.stability_at(eq.u, eq.v)
    }

    fn stability_at(&self, u: f64, v: f64) -> Stability {
        self.jacobian(u, v).stability()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Weak,
    Strong,
    NoCoexistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeClass {
    pub regime: Regime,
    pub r: f64,
    pub s: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Trivial,
    SemiTrivialU,
    SemiTrivialV,
    Coexistence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub u: f64,
    pub v: f64,
    pub kind: EquilibriumKind,
    pub stability: Stability,
}

/// Row-major 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn max_real_eigenvalue(&self) -> f64 {
        max_real_eigenvalue(self.trace(), self.det())
    }

    pub fn stability(&self) -> Stability {
        let (tr, det) = (self.trace(), self.det());
        let scale = tr.abs().max(det.abs().sqrt()).max(1.0);
        let m = max_real_eigenvalue(tr, det);
        if m.abs() < MARGINAL_TOL * scale {
            Stability::Marginal
        } else if m < 0.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        }
    }
}

/// Largest real part among the eigenvalues of a 2x2 matrix with trace `tr` and determinant `det`.
pub fn max_real_eigenvalue(tr: f64, det: f64) -> f64 {
    let half = 0.5 * tr;
    let disc = half * half - det;
    if disc < 0.0 {
        return half;
    }
    let sq = disc.sqrt();
    if half >= 0.0 {
        half + sq
    } else {
        // the larger root is the one prone to cancellation: det / smaller
        let smaller = half - sq;
        if smaller == 0.0 {
            0.0
        } else {
            det / smaller
        }
    }
}

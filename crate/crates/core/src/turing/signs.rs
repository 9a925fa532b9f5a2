//! Sign-structure taxonomy of the reaction Jacobian and the role of `d2 D`.
//!
//! Patterns that can satisfy `tr J < 0`, `det J > 0` either have both diagonal
//! entries negative (no activator-inhibitor structure) or mixed diagonal entries
//! with off-diagonal entries of opposite sign (activator-inhibitor). The remaining
//! eight patterns make the kinetic equilibrium unstable.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinetics::Mat2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn of(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Plus)
        } else if x < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "plus" | "pos" => Ok(Sign::Plus),
            "-" | "minus" | "neg" => Ok(Sign::Minus),
            "0" => Err(Error::invalid("signs", "zero Jacobian entries are not part of the taxonomy")),
            other => Err(Error::invalid("signs", format!("expected '+' or '-', got '{other}'"))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if *self == Sign::Plus { "+" } else { "-" })
    }
}

/// Sign of `d2 D`; unlike Jacobian entries it may vanish.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum D2Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Zero,
}

impl D2Sign {
    pub fn value(self) -> i8 {
        match self {
            D2Sign::Plus => 1,
            D2Sign::Minus => -1,
            D2Sign::Zero => 0,
        }
    }

    pub fn of(x: f64) -> D2Sign {
        match Sign::of(x) {
            Some(Sign::Plus) => D2Sign::Plus,
            Some(Sign::Minus) => D2Sign::Minus,
            None => D2Sign::Zero,
        }
    }
}

impl FromStr for D2Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "0" | "zero" => Ok(D2Sign::Zero),
            other => match other.parse::<Sign>() {
                Ok(Sign::Plus) => Ok(D2Sign::Plus),
                Ok(Sign::Minus) => Ok(D2Sign::Minus),
                Err(_) => Err(Error::invalid("d2_sign", format!("expected '+', '-' or '0', got '{other}'"))),
            },
        }
    }
}

/// Row-major signs `[J11, J12, J21, J22]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignPattern {
    pub j11: Sign,
    pub j12: Sign,
    pub j21: Sign,
    pub j22: Sign,
}

impl SignPattern {
    pub fn new(j11: Sign, j12: Sign, j21: Sign, j22: Sign) -> Self {
        Self { j11, j12, j21, j22 }
    }

    /// Signs of a numeric Jacobian; zero entries are rejected.
    pub fn from_matrix(j: &Mat2) -> Result<Self> {
        let s = |x: f64, name: &str| Sign::of(x).ok_or_else(|| Error::invalid("signs", format!("{name} is zero; the taxonomy needs strict signs")));
        Ok(Self {
            j11: s(j.0[0][0], "J11")?,
            j12: s(j.0[0][1], "J12")?,
            j21: s(j.0[1][0], "J21")?,
            j22: s(j.0[1][1], "J22")?,
        })
    }

    pub fn as_array(&self) -> [Sign; 4] {
        [self.j11, self.j12, self.j21, self.j22]
    }
}

impl FromStr for SignPattern {
    type Err = Error;

    /// Parses `"-,-,-,-"`, `"-- --"`, `"----"` and similar, row-major.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = if s.contains(',') {
            s.split(',').collect()
        } else {
            s.split_whitespace().flat_map(|w| w.split_inclusive(['+', '-'])).collect()
        };
        if parts.len() != 4 {
            return Err(Error::invalid("signs", format!("expected four signs J11,J12,J21,J22, got '{s}'")));
        }
        Ok(Self {
            j11: parts[0].parse()?,
            j12: parts[1].parse()?,
            j21: parts[2].parse()?,
            j22: parts[3].parse()?,
        })
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.j11, self.j12, self.j21, self.j22)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    ReactionUnstable,
    ActivatorInhibitor,
    NonActivatorInhibitor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CrossDiffusionVerdict {
    /// Instability needs `D` increasing in `v` (`d_b > d_a` in the fast system).
    RequiredIncreasing,
    /// Instability needs `D` decreasing in `v` (`d_b < d_a`).
    RequiredDecreasing,
    Enhances,
    Reduces,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignStructure {
    pub signs: SignPattern,
    pub d2_sign: D2Sign,
    pub category: Category,
    pub cross_diffusion_verdict: CrossDiffusionVerdict,
    /// For non-activator-inhibitor patterns: whether `d2_sign` is the one instability needs.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d2_compatible: Option<bool>,
    /// Sign of `dB/d|d2 D|`, i.e. `sign(d2 D) sign(J21)`. Positive raises `B` and shrinks the unstable band.
    pub b_sensitivity: i8,
}

/// Sign of the derivative of `B = -d1D J22 - d_v J11 + d2D J21` with respect to `|d2 D|`.
pub fn b_sensitivity(signs: &SignPattern, d2_sign: D2Sign) -> i8 {
    d2_sign.value() * signs.j21.value()
}

fn category(s: &SignPattern) -> Category {
    use Sign::*;
    match (s.j11, s.j22) {
        (Minus, Minus) => Category::NonActivatorInhibitor,
        (Plus, Plus) => Category::ReactionUnstable,
        _ if s.j12 != s.j21 => Category::ActivatorInhibitor,
        // mixed diagonal with J12 J21 > 0 gives det J < 0
        _ => Category::ReactionUnstable,
    }
}

pub fn sign_classify(signs: SignPattern, d2_sign: D2Sign) -> SignStructure {
    let category = category(&signs);
    let sens = b_sensitivity(&signs, d2_sign);
    let (verdict, compatible) = match category {
        Category::NonActivatorInhibitor => {
            // B < 0 needs d2D J21 < 0
            let (verdict, needed) = match signs.j21 {
                Sign::Minus => (CrossDiffusionVerdict::RequiredIncreasing, D2Sign::Plus),
                Sign::Plus => (CrossDiffusionVerdict::RequiredDecreasing, D2Sign::Minus),
            };
            (verdict, Some(d2_sign == needed))
        }
        Category::ActivatorInhibitor => {
            let verdict = match sens {
                1 => CrossDiffusionVerdict::Reduces,
                -1 => CrossDiffusionVerdict::Enhances,
                _ => CrossDiffusionVerdict::NotApplicable,
            };
            (verdict, None)
        }
        Category::ReactionUnstable => (CrossDiffusionVerdict::NotApplicable, None),
    };
    SignStructure {
        signs,
        d2_sign,
        category,
        cross_diffusion_verdict: verdict,
        d2_compatible: compatible,
        b_sensitivity: sens,
    }
}

/// All sixteen strict sign patterns in lexicographic order (`+` before `-`).
pub fn all_sign_patterns() -> Vec<SignPattern> {
    let s = [Sign::Plus, Sign::Minus];
    let mut out = Vec::with_capacity(16);
    for &a in &s {
        for &b in &s {
            for &c in &s {
                for &d in &s {
                    out.push(SignPattern::new(a, b, c, d));
                }
            }
        }
    }
    out
}

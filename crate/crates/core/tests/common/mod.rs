#![allow(dead_code)]

use crossdiff::diffusivity::{DdsParams, Tabulated, TabulatedSpec, TransitionRates};
use crossdiff::kinetics::{ReactionParams, Regime};
use rand::Rng;

/// Weak-competition witness with `(u*, v*) = (2/3, 1/3)`.
pub fn witness(d12: f64) -> ReactionParams {
    ReactionParams {
        r_u: 3.0,
        r_v: 1.0,
        r11: 4.0,
        r12: 1.0,
        r21: 1.0,
        r22: 1.0,
        d_u: 1.0,
        d_v: 1.0,
        d12,
    }
}

pub fn linear(m: f64) -> TransitionRates {
    TransitionRates::SktLinear { m }
}

/// Relative margin by which `S` and `T` stay away from zero in random draws.
const REGIME_MARGIN: f64 = 0.05;

/// Random kinetic and diffusion coefficients in the requested regime, away from its boundary.
pub fn random_params<R: Rng>(rng: &mut R, regime: Regime) -> ReactionParams {
    loop {
        let p = ReactionParams {
            r_u: rng.gen_range(0.2..3.0),
            r_v: rng.gen_range(0.2..3.0),
            r11: rng.gen_range(0.2..3.0),
            r12: rng.gen_range(0.2..3.0),
            r21: rng.gen_range(0.2..3.0),
            r22: rng.gen_range(0.2..3.0),
            d_u: rng.gen_range(0.2..3.0),
            d_v: rng.gen_range(0.2..3.0),
            d12: 0.0,
        };
        // ratio ordering, written independently of the library's S/T test
        let q = p.r_u / p.r_v;
        let lo = p.r12 / p.r22;
        let hi = p.r11 / p.r21;
        let found = if lo < q && q < hi {
            Regime::Weak
        } else if hi < q && q < lo {
            Regime::Strong
        } else {
            continue;
        };
        let margin = ((q - lo) / q).abs().min(((hi - q) / q).abs());
        if found == regime && margin > REGIME_MARGIN {
            return p;
        }
    }
}

/// Tabulated SKT-admissible rates on `[0, upper]`: `h` increasing, `k` decreasing, both in `(0, 1]`.
pub fn random_tabulated_skt<R: Rng>(rng: &mut R, upper: f64) -> TransitionRates {
    let n = rng.gen_range(4..8);
    let knots: Vec<f64> = (0..n).map(|i| upper * i as f64 / (n - 1) as f64).collect();
    let monotone = |rng: &mut R, start: f64, end: f64| {
        let mut steps: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = steps.iter().sum();
        steps.iter_mut().for_each(|s| *s *= (end - start) / total);
        let mut out = vec![start];
        for s in steps {
            out.push(out.last().unwrap() + s);
        }
        out
    };
    let h0 = rng.gen_range(0.01..0.3);
    let h1 = rng.gen_range(0.5..1.0);
    let k0 = rng.gen_range(0.6..1.0);
    let k1 = rng.gen_range(0.01..0.3);
    let h = monotone(rng, h0, h1);
    let k = monotone(rng, k0, k1);
    TransitionRates::Custom(Tabulated::new(TabulatedSpec { knots, h, k }).expect("valid table"))
}

/// Linear or tabulated SKT rates that cover `[0, 10 r_v / r22]`.
pub fn random_skt_rates<R: Rng>(rng: &mut R, p: &ReactionParams) -> TransitionRates {
    let upper = 10.0 * p.r_v / p.r22;
    if rng.gen_bool(0.5) {
        linear(rng.gen_range(1.05..3.0) * p.r_v / p.r22)
    } else {
        random_tabulated_skt(rng, upper)
    }
}

pub fn random_dds_params<R: Rng>(rng: &mut R, c_zero: bool) -> DdsParams {
    let d_a: f64 = rng.gen_range(0.1..3.0);
    let mut d_b = rng.gen_range(0.1..3.0);
    while (d_b - d_a).abs() < 1e-3 {
        d_b = rng.gen_range(0.1..3.0);
    }
    DdsParams {
        a: rng.gen_range(0.2..3.0),
        b: rng.gen_range(0.2..3.0),
        c: if c_zero { 0.0 } else { rng.gen_range(0.0..3.0) },
        d: rng.gen_range(0.2..3.0),
        d_a,
        d_b,
    }
}

/// Affine or power-law increasing rates.
pub fn random_dds_rates<R: Rng>(rng: &mut R) -> TransitionRates {
    let h0 = rng.gen_range(0.1..2.0);
    let k0 = rng.gen_range(0.1..2.0);
    if rng.gen_bool(0.5) {
        TransitionRates::Affine { h0, k0 }
    } else {
        let alpha = rng.gen_range(0.2..2.0);
        let beta = rng.gen_range(alpha..2.5);
        TransitionRates::PowerLaw { h0, k0, alpha, beta }
    }
}

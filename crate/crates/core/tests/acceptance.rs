//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

mod common;

use std::collections::HashSet;
use std::time::Instant;

use common::{linear, random_dds_params, random_dds_rates, random_params, random_skt_rates, witness};
use crossdiff::analysis::{amplitude, fit_growth, steady_check, GrowthWindow};
use crossdiff::convergence::{epsilon_sweep, ErrorNorm};
use crossdiff::diffusivity::{dds, dds_partials, dds_partition, grad_d_dds, DdsParams, TransitionRates};
use crossdiff::kinetics::{EquilibriumKind, ReactionParams, Regime, Stability};
use crossdiff::model::{ModelSpec, Variant};
use crossdiff::pde::{initial_state, neumann_laplacian, simulate, Controls, Grid1D, InitialSpec, Integrator, Perturbation, SimState};
use crossdiff::turing::{
    all_sign_patterns, coexistence_coeffs, dds_necessary_condition, delta_star, growth_rate, hiding_stability_check, neumann_eigenvalue,
    sign_classify, turing_threshold_plus, unstable_band, Category, CrossDiffusionVerdict, D2Sign, HidingVerdict, SignPattern,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: u32, ok: bool, detail: String) {
    println!("{} criterion {criterion}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Plain bisection for a sign change of `f` on `[lo, hi]`.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    assert!(flo * f(hi) < 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (flo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const C1_DRAWS: usize = 1000;
const C1_MAX_SECONDS: f64 = 5.0;

#[test]
fn criterion_1_equilibrium_stability() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    for regime in [Regime::Weak, Regime::Strong] {
        for _ in 0..C1_DRAWS {
            let p = random_params(&mut rng, regime);
            if p.classify_regime().regime != regime {
                failures.push(format!("{p:?}: regime"));
                continue;
            }
            let eqs = p.equilibria();
            if eqs.len() != 4 {
                failures.push(format!("{p:?}: {} equilibria", eqs.len()));
                continue;
            }
            for eq in &eqs {
                let expected = match (eq.kind, regime) {
                    (EquilibriumKind::Trivial, _) => Stability::Unstable,
                    (EquilibriumKind::SemiTrivialU | EquilibriumKind::SemiTrivialV, Regime::Weak) => Stability::Unstable,
                    (EquilibriumKind::SemiTrivialU | EquilibriumKind::SemiTrivialV, _) => Stability::Stable,
                    (EquilibriumKind::Coexistence, Regime::Weak) => Stability::Stable,
                    (EquilibriumKind::Coexistence, _) => Stability::Unstable,
                };
                if p.classify_equilibrium(eq) != expected || eq.stability != expected {
                    failures.push(format!("{p:?}: {:?} classified {:?}", eq.kind, eq.stability));
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        failures.is_empty() && secs < C1_MAX_SECONDS,
        format!(
            "{} weak + {} strong draws, {} failures, {secs:.3} s (limit {C1_MAX_SECONDS} s){}",
            C1_DRAWS,
            C1_DRAWS,
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    );
}

const C2_CLOSED_TOL: f64 = 1e-10;
const C2_BISECT_TOL: f64 = 1e-8;

#[test]
fn criterion_2_threshold_closed_form() {
    let r = turing_threshold_plus(&witness(150.0), &linear(1.0)).unwrap();
    // quadratic-formula oracle on (αv*)² d² - 2(αβv* + 2 d_v φ det J) d + β² - 4 d_u d_v det J
    // with α = 1/3, β = 3, v* = 1/3, φ = 1/3, det J = u* v* (r11 r22 - r12 r21) = 2/3
    let (qa, qb, qc): (f64, f64, f64) = (1.0 / 81.0, -2.0 * (1.0 / 3.0 + 4.0 / 9.0), 9.0 - 8.0 / 3.0);
    let disc = (qb * qb - 4.0 * qa * qc).sqrt();
    let oracle_minus = (-qb - disc) / (2.0 * qa);
    let oracle_plus = (-qb + disc) / (2.0 * qa);
    let exact_minus = 63.0 - 24.0 * 6f64.sqrt();
    let exact_plus = 63.0 + 24.0 * 6f64.sqrt();
    assert!(rel(oracle_minus, exact_minus) < 1e-12 && rel(oracle_plus, exact_plus) < 1e-12);

    let errs = [
        rel(r.alpha, 1.0 / 3.0),
        rel(r.beta, 3.0),
        rel(r.tilde_d12.unwrap(), 27.0),
        rel(r.d12_minus.unwrap(), oracle_minus),
        rel(r.d12_plus.unwrap(), oracle_plus),
    ];
    let closed_ok = errs.iter().all(|e| *e < C2_CLOSED_TOL);

    // independent route: Δ* = b1² - 4 a2 c0 from the dispersion coefficients
    let f = |d12: f64| delta_star(&witness(d12), &linear(1.0), d12).unwrap();
    let root_plus = bisect(f, 27.0, 200.0);
    let root_minus = bisect(f, 0.0, 27.0);
    let bis_errs = [rel(root_plus, r.d12_plus.unwrap()), rel(root_minus, r.d12_minus.unwrap())];
    let bis_ok = bis_errs.iter().all(|e| *e < C2_BISECT_TOL);
    report(
        2,
        closed_ok && bis_ok,
        format!(
            "alpha = {}, beta = {}, tilde_d12 = {}, d12- = {}, d12+ = {}; max rel err {:.1e} (tol {C2_CLOSED_TOL:.0e}), bisection max rel err {:.1e} (tol {C2_BISECT_TOL:.0e})",
            r.alpha,
            r.beta,
            r.tilde_d12.unwrap(),
            r.d12_minus.unwrap(),
            r.d12_plus.unwrap(),
            errs.iter().cloned().fold(0.0, f64::max),
            bis_errs.iter().cloned().fold(0.0, f64::max)
        ),
    );
}

const C3_STEP: f64 = 1e-3;
const C3_MAX_SECONDS: f64 = 5.0;

#[test]
fn criterion_3_band_flips_at_threshold() {
    let start = Instant::now();
    let d12_plus = 63.0 + 24.0 * 6f64.sqrt();
    let n = ((123.0 - 120.5) / C3_STEP).round() as usize;
    let nonempty: Vec<bool> = (0..=n)
        .map(|k| {
            let d12 = 120.5 + k as f64 * C3_STEP;
            let m = ModelSpec::new(Variant::SktPlusLimit, witness(d12), linear(1.0), None).unwrap();
            unstable_band(&coexistence_coeffs(&m).unwrap()).is_some()
        })
        .collect();
    let secs = start.elapsed().as_secs_f64();
    let flips: Vec<usize> = (1..nonempty.len()).filter(|&k| nonempty[k] != nonempty[k - 1]).collect();
    let ok_shape = flips.len() == 1 && !nonempty[0] && nonempty[n];
    let flip_at = flips.first().map(|&k| 120.5 + k as f64 * C3_STEP).unwrap_or(f64::NAN);
    let ok = ok_shape && (flip_at - d12_plus).abs() <= C3_STEP && secs < C3_MAX_SECONDS;
    report(
        3,
        ok,
        format!(
            "{} grid points, {} flip(s), first non-empty band at d12 = {flip_at:.3} vs d12+ = {d12_plus:.6}, {secs:.3} s",
            n + 1,
            flips.len()
        ),
    );
}

const C4_CELLS: usize = 256;
const C4_LENGTH: f64 = 10.0;
const C4_RATE_TOL: f64 = 0.10;
const C4_AMPLITUDE_TARGET: f64 = 1e-2;
const C4_AMPLITUDE_TIME: f64 = 200.0;
const C4_T_END: f64 = 2000.0;
const C4_STEADY_WINDOW: f64 = 100.0;
const C4_STEADY_TOL: f64 = 1e-6;
const C4_PATTERN_MIN: f64 = 1e-3;
const C4_CONTROL_TOL: f64 = 1e-6;
const C4_MAX_SECONDS: f64 = 120.0;

fn c4_run(d12: f64, t_end: f64) -> (crossdiff::pde::Trajectory, f64) {
    let m = ModelSpec::new(Variant::SktPlusLimit, witness(d12), linear(1.0), None).unwrap();
    let grid = Grid1D::new(C4_LENGTH, C4_CELLS).unwrap();
    let spec = InitialSpec {
        perturbation: Perturbation::Cosine {
            mode: 1,
            amplitude_rel: 1e-3,
        },
        ..Default::default()
    };
    let init = initial_state(&m, &grid, &spec, 0).unwrap();
    let controls = Controls {
        dt_max: 0.1,
        snapshot_every: 1.0,
        integrator: Integrator::Sdirk2,
        ..Default::default()
    };
    let start = Instant::now();
    let traj = simulate(&m, &grid, &init, t_end, &controls).unwrap();
    (traj, start.elapsed().as_secs_f64())
}

#[test]
fn criterion_4_pattern_formation() {
    let (u_star, v_star) = (2.0 / 3.0, 1.0 / 3.0);
    let (traj, secs) = c4_run(150.0, C4_T_END);

    let m = ModelSpec::new(Variant::SktPlusLimit, witness(150.0), linear(1.0), None).unwrap();
    let lambda1 = neumann_eigenvalue(C4_LENGTH, 1);
    let predicted = growth_rate(&coexistence_coeffs(&m).unwrap(), lambda1);
    let fit = fit_growth(&traj, 1, GrowthWindow::linear_regime(1e-3 * u_star, u_star));
    let (rate_ok, rate_msg) = match &fit {
        Ok(f) => (
            rel(f.rate, predicted) <= C4_RATE_TOL,
            format!(
                "fitted rate {:.6} vs {:.6} at lambda1 = {lambda1:.6} (rel {:.3})",
                f.rate,
                predicted,
                rel(f.rate, predicted)
            ),
        ),
        Err(e) => (false, format!("no growth fit: {e}")),
    };

    let k200 = traj.times.iter().position(|t| (*t - C4_AMPLITUDE_TIME).abs() < 1e-9).unwrap();
    let amp200 = amplitude(&traj.total_u(k200));
    let amp_ok = amp200 > C4_AMPLITUDE_TARGET;

    let steady = steady_check(&traj, C4_STEADY_WINDOW, C4_STEADY_TOL).unwrap();
    let final_amp = amplitude(&traj.total_u(traj.len() - 1));
    let steady_ok = steady.steady && final_amp > C4_PATTERN_MIN;

    let (control, control_secs) = c4_run(100.0, C4_AMPLITUDE_TIME);
    let last = control.final_state();
    let control_dev = last.fields[0]
        .iter()
        .map(|u| (u - u_star).abs())
        .chain(last.fields[1].iter().map(|v| (v - v_star).abs()))
        .fold(0.0, f64::max);
    let control_ok = control_dev < C4_CONTROL_TOL;

    let time_ok = secs < C4_MAX_SECONDS && control_secs < C4_MAX_SECONDS;
    report(
        4,
        rate_ok && amp_ok && steady_ok && control_ok && time_ok,
        format!(
            "[{}] {rate_msg}; [{}] max-min of u at t = {C4_AMPLITUDE_TIME} is {amp200:.3e} (target > {C4_AMPLITUDE_TARGET:.0e}); [{}] steady at t = {C4_T_END}: residual {:.2e}, final max-min {final_amp:.4}; [{}] d12 = 100 deviation at t = {C4_AMPLITUDE_TIME}: {control_dev:.2e}; [{}] runtimes {secs:.1} s and {control_secs:.1} s",
            ok_word(rate_ok),
            ok_word(amp_ok),
            ok_word(steady_ok),
            steady.residual,
            ok_word(control_ok),
            ok_word(time_ok),
        ),
    );
}

fn ok_word(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

const C5_DRAWS: usize = 1000;
const C5_SPOT_RUNS: usize = 10;
const C5_SPOT_MIN_DECAY: f64 = 0.02;
const C5_SPOT_REDUCTION: f64 = 1e-2;

fn max_deviation(state: &SimState, u: f64, v: f64) -> f64 {
    state.fields[0]
        .iter()
        .map(|x| (x - u).abs())
        .chain(state.fields[1].iter().map(|x| (x - v).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn criterion_5_hiding_never_destabilises() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut counterexamples = Vec::new();
    let mut spots: Vec<(ReactionParams, TransitionRates, f64)> = Vec::new();
    for _ in 0..C5_DRAWS {
        let mut p = random_params(&mut rng, Regime::Weak);
        p.d12 = rng.gen_range(0.0..1.0) * p.d_u;
        let rates = random_skt_rates(&mut rng, &p);
        let m = ModelSpec::new(Variant::SktMinusLimit, p, rates.clone(), None).unwrap();
        let h = hiding_stability_check(&p, &rates).unwrap();
        let c = coexistence_coeffs(&m).unwrap();
        if !(h.b1 > 0.0 && c.b1 > 0.0 && h.verdict == HidingVerdict::AlwaysStable && unstable_band(&c).is_none()) {
            counterexamples.push(format!("{p:?} {rates:?}: b1 = {}", c.b1));
        }
        // slowest decay over the modes present on [0, 10] at N = 64
        let mu = (0..=32)
            .map(|n| -growth_rate(&c, neumann_eigenvalue(10.0, n)))
            .fold(f64::INFINITY, f64::min);
        if spots.len() < C5_SPOT_RUNS && mu > C5_SPOT_MIN_DECAY {
            spots.push((p, rates, mu));
        }
    }
    let mut decays = 0;
    let mut worst = 0.0f64;
    let grid = Grid1D::new(10.0, 64).unwrap();
    for (p, rates, mu) in &spots {
        let m = ModelSpec::new(Variant::SktMinusLimit, *p, rates.clone(), None).unwrap();
        let (u, v) = p.coexistence().unwrap();
        let spec = InitialSpec {
            perturbation: Perturbation::Cosine {
                mode: 1,
                amplitude_rel: 1e-2,
            },
            ..Default::default()
        };
        let init = initial_state(&m, &grid, &spec, 0).unwrap();
        let t_end = (6.0 / mu).min(400.0).ceil();
        let controls = Controls {
            dt_max: 0.1,
            snapshot_every: t_end / 10.0,
            ..Default::default()
        };
        let traj = simulate(&m, &grid, &init, t_end, &controls).unwrap();
        let ratio = max_deviation(&traj.final_state(), u, v) / max_deviation(&init, u, v);
        worst = worst.max(ratio);
        if ratio < C5_SPOT_REDUCTION {
            decays += 1;
        }
    }
    report(
        5,
        counterexamples.is_empty() && spots.len() == C5_SPOT_RUNS && decays == C5_SPOT_RUNS,
        format!(
            "{C5_DRAWS} draws, {} counterexamples; {decays}/{} spot runs decayed (worst deviation ratio {worst:.2e}, need < {C5_SPOT_REDUCTION:.0e}){}",
            counterexamples.len(),
            spots.len(),
            counterexamples.first().map(|c| format!("; first: {c}")).unwrap_or_default()
        ),
    );
}

fn patterns(list: &[&str]) -> HashSet<SignPattern> {
    list.iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn criterion_6_sign_classifier() {
    let all = all_sign_patterns();
    let of = |cat: Category| -> HashSet<SignPattern> { all.iter().copied().filter(|s| sign_classify(*s, D2Sign::Plus).category == cat).collect() };
    let unstable = of(Category::ReactionUnstable);
    let ai = of(Category::ActivatorInhibitor);
    let nai = of(Category::NonActivatorInhibitor);
    let distinct: HashSet<SignPattern> = all.iter().copied().collect();
    // displayed matrices, row-major
    let ai_paper = patterns(&["+,+,-,-", "+,-,+,-", "-,+,-,+", "-,-,+,+"]);
    let nai_paper = patterns(&["-,-,-,-", "-,+,-,-", "-,-,+,-", "-,+,+,-"]);
    let counts_ok = distinct.len() == 16 && unstable.len() == 8 && ai.len() == 4 && nai.len() == 4;
    let sets_ok = ai == ai_paper && nai == nai_paper;

    let verdict = |s: &str, d2: D2Sign| sign_classify(s.parse().unwrap(), d2).cross_diffusion_verdict;
    use CrossDiffusionVerdict::*;
    let mut checks = Vec::new();
    for s in ["-,-,-,-", "-,+,-,-"] {
        checks.push((s, D2Sign::Plus, verdict(s, D2Sign::Plus) == RequiredIncreasing));
        checks.push((
            s,
            D2Sign::Plus,
            sign_classify(s.parse().unwrap(), D2Sign::Plus).d2_compatible == Some(true),
        ));
        checks.push((
            s,
            D2Sign::Minus,
            sign_classify(s.parse().unwrap(), D2Sign::Minus).d2_compatible == Some(false),
        ));
    }
    for s in ["-,-,+,-", "-,+,+,-"] {
        checks.push((s, D2Sign::Minus, verdict(s, D2Sign::Minus) == RequiredDecreasing));
        checks.push((
            s,
            D2Sign::Minus,
            sign_classify(s.parse().unwrap(), D2Sign::Minus).d2_compatible == Some(true),
        ));
    }
    // increasing D reduces, decreasing D enhances
    for s in ["-,-,+,+", "+,-,+,-"] {
        checks.push((s, D2Sign::Plus, verdict(s, D2Sign::Plus) == Reduces));
        checks.push((s, D2Sign::Minus, verdict(s, D2Sign::Minus) == Enhances));
    }
    // decreasing D reduces, increasing D enhances
    for s in ["+,+,-,-", "-,+,-,+"] {
        checks.push((s, D2Sign::Minus, verdict(s, D2Sign::Minus) == Reduces));
        checks.push((s, D2Sign::Plus, verdict(s, D2Sign::Plus) == Enhances));
    }
    let failed: Vec<String> = checks.iter().filter(|c| !c.2).map(|c| format!("{} with d2 {:?}", c.0, c.1)).collect();
    report(
        6,
        counts_ok && sets_ok && failed.is_empty(),
        format!(
            "{} / {} / {} (reaction-unstable / activator-inhibitor / non-activator-inhibitor), displayed sets match: {sets_ok}, {} verdict checks, {} failed",
            unstable.len(),
            ai.len(),
            nai.len(),
            checks.len(),
            failed.len()
        ),
    );
}

const C7_DRAWS: usize = 10_000;
const C7_RESIDUAL_TOL: f64 = 1e-12;
const C7_FD_TOL: f64 = 1e-6;
const C7_C_ZERO_DRAWS: usize = 100;

/// Central difference with step `h`.
fn central(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn c7_check(dp: &DdsParams, rates: &TransitionRates, u: f64, v: f64) -> Result<(), String> {
    let part = dds_partition(dp, rates, u, v).map_err(|e| e.to_string())?;
    let q = dds::q_value(dp, rates, part.u_a, part.u_b, v).unwrap();
    let scale = dds::partition_scale(dp, rates, u, v).unwrap();
    if (part.u_a + part.u_b - u).abs() > 1e-15 * u.max(1.0) || q.abs() > C7_RESIDUAL_TOL * scale {
        return Err(format!("residual {q:e} at scale {scale}"));
    }
    let p = dds_partials(dp, rates, u, v).unwrap();
    if !(p.du_b_du > 0.0 && p.du_b_du < 1.0) {
        return Err(format!("d1 u_b = {}", p.du_b_du));
    }
    if !(p.du_b_dv >= -dp.d / dp.b && p.du_b_dv <= dp.c / dp.a) {
        return Err(format!("d2 u_b = {} outside [{}, {}]", p.du_b_dv, -dp.d / dp.b, dp.c / dp.a));
    }
    let (d1, d2) = grad_d_dds(dp, rates, u, v).unwrap();
    let bound = (dp.d_a + dp.d_b) * (dp.c / dp.a + dp.d / dp.b);
    if d2.abs() > bound {
        return Err(format!("|d2 D| = {} above {bound}", d2.abs()));
    }
    let ub = |u: f64, v: f64| dds_partition(dp, rates, u, v).unwrap().u_b;
    let dd = |u: f64, v: f64| dds::d_dds(dp, rates, u, v).unwrap();
    let hu = 1e-4 * u;
    let hv = 1e-4 * v.max(1e-2);
    let pairs = [
        ("d1 u_b", p.du_b_du, central(|x| ub(x, v), u, hu)),
        ("d2 u_b", p.du_b_dv, central(|y| ub(u, y), v, hv)),
        ("d1 D", d1, central(|x| dd(x, v), u, hu)),
        ("d2 D", d2, central(|y| dd(u, y), v, hv)),
    ];
    for (name, an, fd) in pairs {
        if (an - fd).abs() > C7_FD_TOL * an.abs() {
            return Err(format!("{name}: analytic {an:e} vs FD {fd:e}"));
        }
    }
    Ok(())
}

#[test]
fn criterion_7_dds_partition() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    for _ in 0..C7_DRAWS {
        let c_zero = rng.gen_bool(0.2);
        let dp = random_dds_params(&mut rng, c_zero);
        let rates = random_dds_rates(&mut rng);
        rates.check_dds_admissible(100.0).unwrap();
        // keep v away from 0 so that the v-stencil stays inside the rate domain
        let u = rng.gen_range(0.01..5.0);
        let v = rng.gen_range(0.01..5.0);
        if let Err(e) = c7_check(&dp, &rates, u, v) {
            failures.push(format!("{dp:?} {rates:?} u = {u} v = {v}: {e}"));
        }
    }
    let mut c_zero_failures = 0;
    for _ in 0..C7_C_ZERO_DRAWS {
        let p = random_params(&mut rng, Regime::Weak);
        let dp = random_dds_params(&mut rng, true);
        let rates = random_dds_rates(&mut rng);
        let eq = p.equilibria().into_iter().find(|e| e.kind == EquilibriumKind::Coexistence).unwrap();
        let cond = dds_necessary_condition(&dp, &rates, &eq).unwrap();
        if cond.satisfied != (dp.d_b < dp.d_a) {
            c_zero_failures += 1;
        }
    }
    report(
        7,
        failures.is_empty() && c_zero_failures == 0,
        format!(
            "{C7_DRAWS} partition draws, {} failures (residual tol {C7_RESIDUAL_TOL:.0e}*scale, FD tol {C7_FD_TOL:.0e}); c = 0 condition mismatches {c_zero_failures}/{C7_C_ZERO_DRAWS}{}",
            failures.len(),
            failures.first().map(|f| format!("; first: {f}")).unwrap_or_default()
        ),
    );
}

const C8_EPSILONS: [f64; 5] = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
const C8_T_END: f64 = 10.0;
const C8_MAX_SECONDS: f64 = 300.0;

#[test]
fn criterion_8_fast_reaction_limit() {
    let start = Instant::now();
    let m = ModelSpec::new(Variant::SktPlusLimit, witness(150.0), linear(1.0), None).unwrap();
    let grid = Grid1D::new(10.0, 64).unwrap();
    let spec = InitialSpec {
        perturbation: Perturbation::Cosine {
            mode: 1,
            amplitude_rel: 1e-3,
        },
        ..Default::default()
    };
    let base = initial_state(&m, &grid, &spec, 0).unwrap();
    let controls = Controls {
        dt_max: 0.1,
        snapshot_every: 1.0,
        ..Default::default()
    };
    let r = epsilon_sweep(&m, &grid, &base, C8_T_END, &C8_EPSILONS, &controls, ErrorNorm::L2Final).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let strictly = r.errors.windows(2).all(|w| w[1] < w[0]);
    let orders: Vec<String> = r.orders.iter().flatten().map(|o| format!("{o:.2}")).collect();
    let errors: Vec<String> = r.errors.iter().map(|e| format!("{e:.3e}")).collect();
    report(
        8,
        strictly && secs < C8_MAX_SECONDS,
        format!(
            "L2 errors at t = {C8_T_END}: [{}]; empirical orders [{}]; {secs:.1} s",
            errors.join(", "),
            orders.join(", ")
        ),
    );
}

const C9_ORDER_MIN: f64 = 1.9;
const C9_EQUILIBRIUM_TOL: f64 = 1e-12;
const C9_MASS_TOL: f64 = 1e-12;

fn laplacian_error(cells: usize, mode: usize, length: f64) -> f64 {
    let g = Grid1D::new(length, cells).unwrap();
    let k = mode as f64 * std::f64::consts::PI / length;
    let w: Vec<f64> = g.centers().iter().map(|x| (k * x).cos()).collect();
    let lap = neumann_laplacian(&w, g.dx());
    lap.iter().zip(&w).map(|(l, wi)| (l + k * k * wi).abs()).fold(0.0, f64::max)
}

#[test]
fn criterion_9_numerics_hygiene() {
    let sizes = [16, 32, 64, 128, 256, 512];
    let errs: Vec<f64> = sizes.iter().map(|&n| laplacian_error(n, 3, 10.0)).collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let order_min = orders.iter().cloned().fold(f64::INFINITY, f64::min);

    let p = witness(150.0);
    let dp = DdsParams {
        a: 1.0,
        b: 1.0,
        c: 0.5,
        d: 0.5,
        d_a: 1.0,
        d_b: 2.0,
    };
    let affine = TransitionRates::Affine { h0: 1.0, k0: 1.0 };
    let models = [
        ModelSpec::new(Variant::SktPlusLimit, p, linear(1.0), None).unwrap(),
        ModelSpec::new(Variant::SktMinusLimit, p.with_d12(0.5), linear(1.0), None).unwrap(),
        ModelSpec::new(Variant::SktFastPlus { epsilon: 1e-2 }, p, linear(1.0), None).unwrap(),
        ModelSpec::new(Variant::DdsLimit, p, affine.clone(), Some(dp)).unwrap(),
        ModelSpec::new(Variant::DdsFast { epsilon: 1e-2 }, p, affine.clone(), Some(dp)).unwrap(),
    ];
    let grid = Grid1D::new(10.0, 64).unwrap();
    let controls = Controls {
        dt_max: 0.1,
        snapshot_every: 5.0,
        ..Default::default()
    };
    let mut eq_dev = 0.0f64;
    for m in &models {
        let (u, v) = m.params.coexistence().unwrap();
        let init = SimState::homogeneous(m, &grid, u, v).unwrap();
        let traj = simulate(m, &grid, &init, 20.0, &controls).unwrap();
        for (a, b) in traj.final_state().fields.iter().flatten().zip(init.fields.iter().flatten()) {
            eq_dev = eq_dev.max((a - b).abs());
        }
    }

    let diffusion_only = Controls {
        reactions: false,
        ..controls
    };
    let noise = InitialSpec {
        perturbation: Perturbation::Noise { amplitude_rel: 0.5 },
        ..Default::default()
    };
    let mut mass_err = 0.0f64;
    for m in [
        ModelSpec::new(Variant::SktPlusLimit, p.with_d12(0.0), linear(1.0), None).unwrap(),
        ModelSpec::new(Variant::DdsLimit, p, affine, Some(dp)).unwrap(),
    ] {
        let init = initial_state(&m, &grid, &noise, 9).unwrap();
        let traj = simulate(&m, &grid, &init, 10.0, &diffusion_only).unwrap();
        let last = traj.final_state();
        for (a, b) in last.fields.iter().zip(&init.fields) {
            let (ma, mb) = (a.iter().sum::<f64>(), b.iter().sum::<f64>());
            mass_err = mass_err.max(rel(ma, mb));
        }
    }
    report(
        9,
        order_min >= C9_ORDER_MIN && eq_dev <= C9_EQUILIBRIUM_TOL && mass_err <= C9_MASS_TOL,
        format!(
            "Laplacian orders {:.3?} (min {order_min:.3}, need >= {C9_ORDER_MIN}); equilibrium drift {eq_dev:.1e} over {} models (tol {C9_EQUILIBRIUM_TOL:.0e}); relative mass change {mass_err:.1e} (tol {C9_MASS_TOL:.0e})",
            orders,
            models.len()
        ),
    );
}

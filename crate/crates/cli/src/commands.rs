use std::fs::File;
use std::io::BufWriter;

use crossdiff::analysis::pattern_report;
use crossdiff::config::RunConfig;
use crossdiff::convergence::epsilon_sweep;
use crossdiff::kinetics::{EquilibriumKind, Regime};
use crossdiff::model::Family;
use crossdiff::pde::output::save_trajectory_csv;
use crossdiff::pde::{initial_state, simulate as run_simulation};
use crossdiff::turing::{
    coexistence_coeffs, dds_necessary_condition, growth_rate, hiding_stability_check, neumann_eigenvalue, sign_classify, turing_threshold_plus,
    unstable_band, D2Sign, SignPattern,
};
use crossdiff::{Error, Result};
use serde_json::{json, Value};

use crate::run::{load_config, RunDir};
use crate::Common;

/// A single `--d12` value overrides the configured coefficient.
fn apply_d12_override(cfg: &mut RunConfig, common: &Common) -> Result<()> {
    if let Some(list) = &common.d12 {
        match list.as_slice() {
            [d12] => cfg.model.params.d12 = *d12,
            _ => return Err(Error::invalid("d12", "only `sweep` accepts more than one value")),
        }
        cfg.validate()?;
    }
    Ok(())
}

fn config_for(common: &Common) -> Result<RunConfig> {
    let mut cfg = load_config(common)?;
    apply_d12_override(&mut cfg, common)?;
    Ok(cfg)
}

fn open_run(common: &Common, command: &str, cfg: &RunConfig) -> Result<RunDir> {
    RunDir::create(common, command, json!({ "config": cfg }), cfg.output_dir.as_deref())
}

fn csv_writer(path: &std::path::Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

pub fn analyze(common: &Common) -> Result<()> {
    let cfg = config_for(common)?;
    let p = cfg.model.params;
    let class = p.classify_regime();
    if class.regime == Regime::NoCoexistence {
        return Err(Error::NoCoexistence(class.regime));
    }
    let equilibria = p.equilibria();
    let coexistence = equilibria.iter().find(|e| e.kind == EquilibriumKind::Coexistence).copied();
    let report = json!({
        "regime": class,
        "equilibria": equilibria,
        "jacobian_at_coexistence": coexistence.map(|e| p.jacobian(e.u, e.v)),
    });
    let mut run = open_run(common, "analyze", &cfg)?;
    run.write_json("analysis.json", &report)?;
    let summary = coexistence
        .map(|e| format!("regime {:?}; coexistence ({:.6}, {:.6}) is {:?}", class.regime, e.u, e.v, e.stability))
        .unwrap_or_default();
    run.finish(common.quiet, &summary)
}

pub fn threshold(common: &Common) -> Result<()> {
    let cfg = config_for(common)?;
    let model = cfg.model.limit();
    let p = model.params;
    let (report, summary) = match model.family() {
        Family::Avoidance => {
            let mut r = turing_threshold_plus(&p, &model.rates)?;
            if let Some(g) = cfg.grid {
                r = r.with_domain(g.length);
            }
            let summary = format!(
                "d12+ = {}; d12 = {} -> turing_possible = {} ({:?})",
                r.d12_plus.map(|d| d.to_string()).unwrap_or_else(|| "none".into()),
                r.d12,
                r.turing_possible,
                r.reason
            );
            (json!({ "family": "avoidance", "threshold": r }), summary)
        }
        Family::Hiding => {
            let h = hiding_stability_check(&p, &model.rates)?;
            let band = unstable_band(&coexistence_coeffs(&model)?);
            let summary = format!("{:?}: {}", h.verdict, h.note);
            (json!({ "family": "hiding", "hiding": h, "band": band }), summary)
        }
        Family::Starvation => {
            let eq = p
                .equilibria()
                .into_iter()
                .find(|e| e.kind == EquilibriumKind::Coexistence)
                .ok_or(Error::NoCoexistence(p.classify_regime().regime))?;
            let cond = dds_necessary_condition(model.dds_params()?, &model.rates, &eq)?;
            let band = unstable_band(&coexistence_coeffs(&model)?);
            let modes = match (band, cfg.grid) {
                (Some(b), Some(g)) => Some(b.modes_in(g.length)),
                _ => None,
            };
            let summary = format!(
                "necessary condition satisfied = {}; unstable band {:?}",
                cond.satisfied,
                band.map(|b| (b.lo, b.hi))
            );
            (
                json!({ "family": "starvation", "condition": cond, "band": band, "unstable_modes": modes }),
                summary,
            )
        }
    };
    let mut run = open_run(common, "threshold", &cfg)?;
    run.write_json("threshold.json", &report)?;
    run.finish(common.quiet, &summary)
}

pub fn dispersion(common: &Common) -> Result<()> {
    let cfg = config_for(common)?;
    let model = cfg.model.limit();
    let coeffs = coexistence_coeffs(&model)?;
    let band = unstable_band(&coeffs);
    let lambda_max = cfg.dispersion.lambda_max.unwrap_or_else(|| band.map(|b| 2.0 * b.hi).unwrap_or(1.0));
    let points = cfg.dispersion.points;

    let mut run = open_run(common, "dispersion", &cfg)?;
    let mut w = csv_writer(&run.file("dispersion.csv"))?;
    w.write_record(["lambda", "mode_det", "mode_trace", "growth_rate"])?;
    for k in 0..points {
        let lambda = lambda_max * k as f64 / (points - 1) as f64;
        w.write_record([lambda, coeffs.mode_det(lambda), coeffs.mode_trace(lambda), growth_rate(&coeffs, lambda)].map(|x| x.to_string()))?;
    }
    w.flush()?;

    let mut modes = Vec::new();
    if let Some(g) = cfg.grid {
        let mut w = csv_writer(&run.file("modes.csv"))?;
        w.write_record(["n", "lambda", "growth_rate", "unstable"])?;
        for n in 0..=g.cells / 2 {
            let lambda = neumann_eigenvalue(g.length, n);
            if lambda > lambda_max {
                break;
            }
            let rate = growth_rate(&coeffs, lambda);
            w.write_record([n.to_string(), lambda.to_string(), rate.to_string(), (rate > 0.0).to_string()])?;
            modes.push(json!({ "n": n, "lambda": lambda, "growth_rate": rate }));
        }
        w.flush()?;
    }
    run.write_json(
        "dispersion.json",
        &json!({ "coefficients": coeffs, "band": band, "lambda_max": lambda_max, "points": points, "modes": modes }),
    )?;
    let summary = match band {
        Some(b) => format!("unstable band ({}, {})", b.lo, b.hi),
        None => "no unstable band".into(),
    };
    run.finish(common.quiet, &summary)
}

pub fn simulate(common: &Common) -> Result<()> {
    let cfg = config_for(common)?;
    let grid = cfg.require_grid()?;
    let time = cfg.require_time()?;
    let model = &cfg.model;
    let init = initial_state(model, &grid, &cfg.initial, cfg.seed)?;
    let traj = run_simulation(model, &grid, &init, time.t_end, &time.controls)?;
    let (u0, _) = cfg.initial.base_values(model)?;
    let opts = cfg.report_options(u0);
    let pattern = pattern_report(&traj, &opts)?;
    let predicted = match (opts.fit_mode, coexistence_coeffs(&model.limit())) {
        (Some(n), Ok(c)) => {
            let lambda = neumann_eigenvalue(grid.length, n);
            Some(json!({ "mode": n, "lambda": lambda, "growth_rate": growth_rate(&c, lambda) }))
        }
        _ => None,
    };

    let mut run = open_run(common, "simulate", &cfg)?;
    save_trajectory_csv(&traj, &run.file("trajectory.csv"))?;
    let mut w = csv_writer(&run.file("diagnostics.csv"))?;
    for d in &traj.diagnostics {
        w.serialize(d)?;
    }
    w.flush()?;
    run.write_json(
        "report.json",
        &json!({
            "pattern": pattern,
            "predicted_growth": predicted,
            "steps": traj.steps,
            "snapshots": traj.len(),
            "t_end": traj.times.last(),
            "fields": traj.field_names,
        }),
    )?;
    let summary = format!(
        "final max-min {:.6e}, dominant mode {}, steady = {}",
        pattern.final_amplitude, pattern.dominant_mode, pattern.steady.steady
    );
    run.finish(common.quiet, &summary)
}

pub fn sweep(common: &Common) -> Result<()> {
    let mut cfg = load_config(common)?;
    if let Some(list) = &common.d12 {
        cfg.sweep.d12 = list.clone();
        cfg.validate()?;
    }
    if cfg.sweep.epsilons.is_empty() && cfg.sweep.d12.is_empty() {
        return Err(Error::invalid(
            "sweep",
            "give --epsilons or --d12 (or sweep.epsilons / sweep.d12 in the config)",
        ));
    }
    let mut run = open_run(common, "sweep", &cfg)?;
    let mut summary = Vec::new();

    if !cfg.sweep.epsilons.is_empty() {
        let grid = cfg.require_grid()?;
        let time = cfg.require_time()?;
        let limit = cfg.model.limit();
        let base = initial_state(&limit, &grid, &cfg.initial, cfg.seed)?;
        let r = epsilon_sweep(&cfg.model, &grid, &base, time.t_end, &cfg.sweep.epsilons, &time.controls, cfg.sweep.norm)?;
        r.write_csv(BufWriter::new(File::create(run.file("sweep_epsilon.csv"))?))?;
        run.write_json("sweep_epsilon.json", &json!({ "result": r, "strictly_decreasing": r.is_decreasing(0.0) }))?;
        summary.push(format!("epsilon sweep: errors strictly decreasing = {}", r.is_decreasing(0.0)));
    }

    if !cfg.sweep.d12.is_empty() {
        let base = cfg.model.limit();
        let mut rows = Vec::with_capacity(cfg.sweep.d12.len());
        let mut w = csv_writer(&run.file("sweep_d12.csv"))?;
        w.write_record(["d12", "b1", "band_lo", "band_hi", "unstable", "unstable_modes"])?;
        for &d12 in &cfg.sweep.d12 {
            let mut m = base.clone();
            m.params.d12 = d12;
            m.validate().map_err(|e| e.context(format!("d12 = {d12}")))?;
            let c = coexistence_coeffs(&m)?;
            let band = unstable_band(&c);
            let modes = match (band, cfg.grid) {
                (Some(b), Some(g)) => b.modes_in(g.length),
                _ => Vec::new(),
            };
            let cell = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
            let mode_list = modes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(";");
            w.write_record([
                d12.to_string(),
                c.b1.to_string(),
                cell(band.map(|b| b.lo)),
                cell(band.map(|b| b.hi)),
                band.is_some().to_string(),
                mode_list,
            ])?;
            rows.push(json!({ "d12": d12, "b1": c.b1, "band": band, "unstable_modes": modes }));
        }
        w.flush()?;
        let flip = rows
            .windows(2)
            .find(|w| w[0]["band"].is_null() != w[1]["band"].is_null())
            .map(|w| w[1]["d12"].clone());
        let d12_plus = match base.family() {
            Family::Avoidance => turing_threshold_plus(&base.params, &base.rates).ok().and_then(|r| r.d12_plus),
            _ => None,
        };
        run.write_json("sweep_d12.json", &json!({ "rows": rows, "first_flip_d12": flip, "d12_plus": d12_plus }))?;
        summary.push(format!(
            "d12 sweep: {} points, band changes at {}",
            cfg.sweep.d12.len(),
            flip.unwrap_or(Value::Null)
        ));
    }
    run.finish(common.quiet, &summary.join("\n"))
}

pub fn classify(signs: SignPattern, d2_sign: D2Sign, common: &Common) -> Result<()> {
    let s = sign_classify(signs, d2_sign);
    let mut run = RunDir::create(common, "classify", json!({ "signs": signs.to_string(), "d2_sign": d2_sign }), None)?;
    run.write_json("classification.json", &serde_json::to_value(s)?)?;
    let summary = format!("{:?}, {:?}", s.category, s.cross_diffusion_verdict);
    run.finish(common.quiet, &summary)
}

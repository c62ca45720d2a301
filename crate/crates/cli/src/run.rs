use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use rsw_core::diagnostics::{
    moment_residuals, moments_planar, moments_radial, perturbation_amplitude, support_radius, support_tracker,
    theorem1_criterion, theorem2_report,
};
use rsw_core::io::{write_planar_csv, write_radial_csv, write_record_jsonl, write_trajectory_csv};
use rsw_core::model::{perturbation_support, validate_config, MomentSet, PlanarState, RunRecord, ScenarioConfig, ScenarioKind};
use rsw_core::planar::run_planar;
use rsw_core::radial::run_radial;
use rsw_core::scalar::to_f64;
use rsw_core::separated::{blowup_rates, trace, TraceOptions};
use rsw_core::Real;
use serde_json::{json, Value};

use crate::Usage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scalar {
    F64,
    F32,
}

#[derive(Args)]
pub struct RunArgs {
    /// Scenario config (JSON).
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Override the config horizon.
    #[arg(long)]
    horizon: Option<f64>,
    /// Override the config rest depth.
    #[arg(long)]
    h_bar: Option<f64>,
    /// Floating-point type of the solver state.
    #[arg(long, value_enum, default_value_t = Scalar::F64)]
    scalar: Scalar,
}

fn load_config(args: &RunArgs) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Usage(format!("cannot read config {}: {e}", args.config.display())))?;
    let mut cfg: ScenarioConfig =
        serde_json::from_str(&text).map_err(|e| Usage(format!("config {}: {e}", args.config.display())))?;
    if let Some(h) = args.horizon {
        cfg.horizon = h;
    }
    if let Some(h) = args.h_bar {
        cfg.h_bar = h;
    }
    validate_config(&cfg).map_err(|e| Usage(e.to_string()).into())
}

pub fn cmd_run(args: &RunArgs) -> Result<ExitCode> {
    let cfg = load_config(args)?;
    fs::create_dir_all(args.out.join("snapshots")).with_context(|| format!("creating {}", args.out.display()))?;
    fs::write(args.out.join("config.json"), serde_json::to_string_pretty(&cfg)?)?;
    let summary = match (cfg.kind, args.scalar) {
        (ScenarioKind::Separated, _) => separated_run(&cfg, &args.out)?,
        (ScenarioKind::Radial, Scalar::F64) => radial_run::<f64>(&cfg, &args.out)?,
        (ScenarioKind::Radial, Scalar::F32) => radial_run::<f32>(&cfg, &args.out)?,
        (ScenarioKind::Planar, Scalar::F64) => planar_run::<f64>(&cfg, &args.out)?,
        (ScenarioKind::Planar, Scalar::F32) => planar_run::<f32>(&cfg, &args.out)?,
    };
    fs::write(args.out.join("summary.json"), serde_json::to_string_pretty(&summary)?)?;
    println!("{} at t={}", summary["termination"]["cause"].as_str().unwrap_or("done"), summary["termination"]["t"]);
    Ok(ExitCode::SUCCESS)
}

fn write_record(record: &RunRecord, out: &Path) -> Result<()> {
    write_record_jsonl(record, BufWriter::new(File::create(out.join("record.jsonl"))?))?;
    Ok(())
}

fn snapshot_path(out: &Path, i: usize) -> PathBuf {
    out.join("snapshots").join(format!("{i:04}.csv"))
}

fn forecast(record: &RunRecord) -> Value {
    let moments: Vec<MomentSet<f64>> = record.diagnostics.iter().filter_map(|d| d.moments).collect();
    match moment_residuals(&record.times(), &moments) {
        Ok(r) => json!({ "relative": r.relative(), "residuals": r }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn common(record: &RunRecord) -> Value {
    json!({
        "termination": record.termination,
        "blowup": record.blowup,
        "steps": record.scheme.steps,
        "forecast": forecast(record),
    })
}

fn radial_run<T: Real>(cfg: &ScenarioConfig, out: &Path) -> Result<Value> {
    let run = run_radial::<T>(cfg)?;
    write_record(&run.record, out)?;
    for (i, s) in run.snapshots.iter().enumerate() {
        write_radial_csv(s, BufWriter::new(File::create(snapshot_path(out, i))?))?;
    }
    let initial = &run.snapshots[0];
    let amplitude = perturbation_amplitude(initial);
    let threshold = amplitude * T::from(cfg.diagnostics.support_threshold).expect("finite threshold");
    let radius = if amplitude > T::zero() { support_radius(initial, threshold) } else { T::zero() };
    let h_sup = initial.h.iter().fold(T::zero(), |m, &h| m.max(h));
    let criterion = theorem1_criterion(&moments_radial(initial), radius, initial.h_bar, h_sup);

    let mut summary = common(&run.record);
    summary["criterion"] = json!({
        "holds": criterion.holds,
        "mass_positive": criterion.mass_positive,
        "lhs": to_f64(criterion.lhs),
        "rhs": to_f64(criterion.rhs),
        "margin": to_f64(criterion.margin),
        "support_radius": to_f64(radius),
    });
    if amplitude > T::zero() {
        summary["support"] = match support_tracker(&run.snapshots, threshold) {
            Ok(s) => serde_json::to_value(s)?,
            Err(e) => json!({ "error": e.to_string() }),
        };
    }
    if cfg.diagnostics.report_samples > 0 {
        summary["weighted_momentum"] = weighted_momentum(cfg, &run.snapshots);
    }
    Ok(summary)
}

/// Weighted-momentum report at up to `report_samples` stored snapshot times.
fn weighted_momentum<T: Real>(cfg: &ScenarioConfig, snapshots: &[rsw_core::model::RadialState<T>]) -> Value {
    let Some(support) = perturbation_support(&cfg.initial).filter(|s| s.0 > 0.0) else {
        return json!({ "error": "initial perturbation has no support away from the origin" });
    };
    let times: Vec<f64> = snapshots.iter().skip(1).map(|s| to_f64(s.t)).collect();
    let stride = times.len().div_ceil(cfg.diagnostics.report_samples).max(1);
    let mut picked: Vec<f64> = times.iter().copied().step_by(stride).collect();
    if let Some(&last) = times.last() {
        if picked.last() != Some(&last) {
            picked.push(last);
        }
    }
    match theorem2_report(snapshots, &picked, support, cfg.diagnostics.epsilon) {
        Ok(r) => serde_json::to_value(r).unwrap_or(Value::Null),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

/// Largest `|x|` over cells whose perturbation exceeds `threshold`.
fn planar_support_radius<T: Real>(s: &PlanarState<T>, threshold: T) -> T {
    let mut r = T::zero();
    for j in 0..s.ny {
        for i in 0..s.nx {
            let k = s.index(i, j);
            if (s.h[k] - s.h_bar).abs().max(s.hu[k].abs()).max(s.hv[k].abs()) > threshold {
                r = r.max(s.x(i).hypot(s.y(j)));
            }
        }
    }
    r
}

fn planar_run<T: Real>(cfg: &ScenarioConfig, out: &Path) -> Result<Value> {
    let run = run_planar::<T>(cfg)?;
    write_record(&run.record, out)?;
    for (i, s) in run.snapshots.iter().enumerate() {
        write_planar_csv(s, BufWriter::new(File::create(snapshot_path(out, i))?))?;
    }
    let initial = &run.snapshots[0];
    let amplitude = (0..initial.h.len()).fold(T::zero(), |m, k| {
        m.max((initial.h[k] - initial.h_bar).abs()).max(initial.hu[k].abs()).max(initial.hv[k].abs())
    });
    let threshold = amplitude * T::from(cfg.diagnostics.support_threshold).expect("finite threshold");
    let radius = if amplitude > T::zero() { planar_support_radius(initial, threshold) } else { T::zero() };
    let h_sup = initial.h.iter().fold(T::zero(), |m, &h| m.max(h));
    let criterion = theorem1_criterion(&moments_planar(initial), radius, initial.h_bar, h_sup);
    let mut summary = common(&run.record);
    summary["criterion"] = json!({
        "holds": criterion.holds,
        "mass_positive": criterion.mass_positive,
        "lhs": to_f64(criterion.lhs),
        "rhs": to_f64(criterion.rhs),
        "margin": to_f64(criterion.margin),
        "support_radius": to_f64(radius),
    });
    Ok(summary)
}

fn separated_run(cfg: &ScenarioConfig, out: &Path) -> Result<Value> {
    let p = |k: &str| cfg.initial.param(k, 0.0);
    let opts = TraceOptions { tol: cfg.solver.tol, escape_threshold: cfg.solver.escape_threshold, max_step: None };
    let traj = trace(p("g0"), p("xi0"), p("eta0"), cfg.horizon, &opts)?;
    write_trajectory_csv(&traj, BufWriter::new(File::create(out.join("trajectory.csv"))?))?;
    let end = traj.last().t;
    let (cause, t) = match traj.escape_time {
        Some(t) => ("escape_threshold", t),
        None => ("horizon", end),
    };
    let blowup = if traj.regime.is_blowup() {
        match blowup_rates(&traj, &[0.5, 1.0, 2.0]) {
            Ok(r) => serde_json::to_value(r)?,
            Err(e) => json!({ "error": e.to_string() }),
        }
    } else {
        Value::Null
    };
    Ok(json!({
        "termination": { "cause": cause, "t": t },
        "regime": traj.regime,
        "max_kappa_drift": traj.max_kappa_drift(),
        "blowup": blowup,
    }))
}

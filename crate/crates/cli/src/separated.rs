use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;
use rsw_core::io::{write_series_csv, write_trajectory_csv};
use rsw_core::separated::{blowup_rates, classify, initial_from_kappa, trace, Regime, TraceOptions};
use rsw_core::{Regime64, SeparatedTrajectory64};
use serde_json::json;

use crate::Usage;

const PROBES: [f64; 3] = [0.5, 1.0, 2.0];
const PHASE_SAMPLES: usize = 400;

#[derive(Args)]
pub struct SeparatedArgs {
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    g0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    xi0: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    eta0: f64,
    #[arg(long, default_value_t = 2.0 * std::f64::consts::PI)]
    horizon: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Truncation of blowup trajectories at |theta| (or |xi| on the tangent branch).
    #[arg(long, default_value_t = 1e6)]
    escape_threshold: f64,
    /// Sweep `kappa0=a:b:n` (n evenly spaced values, xi0 fixed); replaces --eta0.
    #[arg(long)]
    sweep: Option<SweepSpec>,
    /// Directory for trajectory CSVs and reports.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        (0..self.n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (self.n - 1) as f64).collect()
    }
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let range = s.strip_prefix("kappa0=").ok_or("sweep must look like kappa0=a:b:n")?;
        let parts: Vec<&str> = range.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err("sweep must look like kappa0=a:b:n".into());
        };
        let num = |x: &str| x.parse::<f64>().map_err(|_| format!("'{x}' is not a number"));
        let spec = SweepSpec {
            lo: num(lo)?,
            hi: num(hi)?,
            n: n.parse().map_err(|_| format!("'{n}' is not a count"))?,
        };
        if spec.n == 0 || !(spec.hi >= spec.lo) || spec.hi > 1.0 {
            return Err("sweep needs n >= 1 and lo <= hi <= 1".into());
        }
        Ok(spec)
    }
}

fn options(args: &SeparatedArgs) -> Result<TraceOptions<f64>> {
    if !(args.tol > 0.0) || !(args.escape_threshold > 1.0) || !(args.horizon > 0.0) {
        return Err(Usage("tol and horizon must be positive and escape-threshold above 1".into()).into());
    }
    Ok(TraceOptions { tol: args.tol, escape_threshold: args.escape_threshold, max_step: None })
}

/// `κ₀` to ten decimals with trailing zeros dropped, hiding roundoff from recomputing it.
fn short(x: f64) -> String {
    let s = format!("{x:.10}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

fn describe(regime: &Regime64) -> String {
    match *regime {
        Regime::Equilibrium { kappa0 } | Regime::Periodic { kappa0, .. } => {
            format!("{} kappa0={}", regime.name(), short(kappa0))
        }
        Regime::Blowup { kappa0, t_blowup } => format!("Blowup kappa0={} t0={t_blowup}", short(kappa0)),
        Regime::ExplicitTan { t_blowup } => format!("ExplicitTan t0={t_blowup}"),
    }
}

/// Distance between `(ξ, η)` after one period and the initial point.
fn closure(traj: &SeparatedTrajectory64) -> Result<f64> {
    let (a, b) = (traj.first(), traj.state_at(2.0 * std::f64::consts::PI)?);
    Ok((b.xi - a.xi).hypot(b.eta - a.eta))
}

fn write_outputs(dir: &Path, traj: &SeparatedTrajectory64) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_trajectory_csv(traj, BufWriter::new(File::create(dir.join("trajectory.csv"))?))?;

    let end = traj.last().t;
    let rows: Vec<Vec<f64>> = (0..=PHASE_SAMPLES)
        .map(|i| {
            let s = traj.state_at(end * i as f64 / PHASE_SAMPLES as f64)?;
            Ok(vec![s.t, s.xi, s.eta, s.theta()])
        })
        .collect::<rsw_core::Result<_>>()?;
    write_series_csv(
        BufWriter::new(File::create(dir.join("phase.csv"))?),
        "rsw-phase-portrait",
        &["t", "xi", "eta", "theta"],
        &rows,
    )?;

    let regime = json!({
        "regime": traj.regime,
        "initial": traj.first(),
        "final": traj.last(),
        "max_kappa_drift": traj.max_kappa_drift(),
        "escape_time": traj.escape_time,
        "samples": traj.len(),
    });
    fs::write(dir.join("regime.json"), serde_json::to_string_pretty(&regime)?)?;
    if traj.regime.is_blowup() {
        let report = blowup_rates(traj, &PROBES)?;
        fs::write(dir.join("blowup.json"), serde_json::to_string_pretty(&report)?)?;
    }
    Ok(())
}

pub fn cmd_separated(args: &SeparatedArgs) -> Result<ExitCode> {
    let opts = options(args)?;
    match &args.sweep {
        None => {
            let regime = classify(args.xi0, args.eta0)?;
            println!("{}", describe(&regime));
            let traj = trace(args.g0, args.xi0, args.eta0, args.horizon, &opts)?;
            if let Some(dir) = &args.out {
                write_outputs(dir, &traj)?;
            }
        }
        Some(spec) => sweep(args, spec, &opts)?,
    }
    Ok(ExitCode::SUCCESS)
}

struct SweepRow {
    kappa0: f64,
    eta0: f64,
    regime: Regime64,
    closure: Option<f64>,
}

fn sweep(args: &SeparatedArgs, spec: &SweepSpec, opts: &TraceOptions<f64>) -> Result<()> {
    let values = spec.values();
    let rows: Vec<SweepRow> = values
        .par_iter()
        .enumerate()
        .map(|(i, &k0)| -> Result<SweepRow> {
            let (xi0, eta0) = initial_from_kappa(k0, args.xi0, true)
                .ok_or_else(|| Usage(format!("no initial data with kappa0={k0} and xi0={}", args.xi0)))?;
            let regime = classify(xi0, eta0)?;
            let horizon = match regime {
                Regime::Periodic { .. } | Regime::Equilibrium { .. } => args.horizon.max(2.0 * std::f64::consts::PI),
                _ => args.horizon,
            };
            let traj = trace(args.g0, xi0, eta0, horizon, opts)?;
            let closure = match regime {
                Regime::Periodic { .. } | Regime::Equilibrium { .. } => Some(closure(&traj)?),
                _ => None,
            };
            if let Some(dir) = &args.out {
                write_outputs(&dir.join(format!("run_{i:03}")), &traj)?;
            }
            Ok(SweepRow { kappa0: k0, eta0, regime, closure })
        })
        .collect::<Result<_>>()?;

    for r in &rows {
        match r.closure {
            Some(c) => println!("{} closure={c:.3e}", describe(&r.regime)),
            None => println!("{}", describe(&r.regime)),
        }
    }
    if let Some(dir) = &args.out {
        let table: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.kappa0,
                    args.xi0,
                    r.eta0,
                    r.closure.unwrap_or(f64::NAN),
                    r.regime.t_blowup().unwrap_or(f64::NAN),
                ]
            })
            .collect();
        write_series_csv(
            BufWriter::new(File::create(dir.join("sweep.csv"))?),
            "rsw-kappa-sweep",
            &["kappa0", "xi0", "eta0", "closure", "t0"],
            &table,
        )?;
    }
    Ok(())
}

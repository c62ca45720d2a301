use std::collections::BTreeMap;

use crate::diagnostics::moments_radial;
use crate::error::{Error, Result};
use crate::model::{
    build_initial_radial, validate_config, BlowupSummary, GridSpec, MomentSet, RadialGrid, RadialState, RunRecord,
    ScenarioConfig, SchemeMeta, StepDiagnostics, Termination,
};
use crate::scalar::{lit, to_f64, Real};
use crate::separated::{power_fit, trace, TraceOptions};

use super::scheme::{pack, unpack, AdvanceOutcome, RadialBoundary, RadialScheme, SeparatedTrace, Stepper};

/// Output schedule and particle tracking for a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunPlan<T> {
    pub horizon: T,
    /// Spacing of recorded outputs.
    pub interval: T,
    /// Store a full state every this many outputs (0: only the initial and final states).
    pub snapshot_every: usize,
    /// Initial radii of tracked particle paths.
    pub track_paths: Vec<T>,
    /// Label offset of the two neighbor paths used for `∂X/∂X₀`; defaults to the cell size.
    pub path_offset: Option<T>,
}

impl<T: Real> RunPlan<T> {
    pub fn new(horizon: T, outputs: usize) -> Self {
        Self {
            horizon,
            interval: horizon / lit(outputs.max(1) as f64),
            snapshot_every: 1,
            track_paths: Vec::new(),
            path_offset: None,
        }
    }
}

/// Particle paths integrated alongside a run, with the fields sampled on them.
///
/// Each label carries three paths started at `x₀ − δ`, `x₀`, `x₀ + δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathHistory<T> {
    pub labels: Vec<T>,
    pub offset: T,
    pub times: Vec<T>,
    /// Per output: `[X(x₀ − δ), X(x₀), X(x₀ + δ)]` for every label, concatenated.
    pub positions: Vec<Vec<T>>,
    /// Per output: `h`, `U`, `V` interpolated at `X(x₀)` for every label.
    pub h: Vec<Vec<T>>,
    pub u: Vec<Vec<T>>,
    pub v: Vec<Vec<T>>,
}

impl<T: Real> PathHistory<T> {
    pub fn center(&self, out: usize, label: usize) -> T {
        self.positions[out][3 * label + 1]
    }

    /// Central difference `∂X/∂X₀` of one label at one output.
    pub fn stretch(&self, out: usize, label: usize) -> T {
        let p = &self.positions[out];
        (p[3 * label + 2] - p[3 * label]) / (lit::<T>(2.0) * self.offset)
    }
}

/// Everything a radial evolution produced.
#[derive(Clone, Debug)]
pub struct RadialEvolution<T> {
    pub diagnostics: Vec<StepDiagnostics>,
    pub termination: Termination,
    pub snapshots: Vec<RadialState<T>>,
    pub paths: Option<PathHistory<T>>,
    pub final_state: RadialState<T>,
    pub steps: usize,
    pub scheme: RadialScheme<T>,
}

fn moments_f64<T: Real>(m: &MomentSet<T>) -> MomentSet<f64> {
    MomentSet { p1: to_f64(m.p1), p2: to_f64(m.p2), e: to_f64(m.e), m: to_f64(m.m), p: to_f64(m.p), q: to_f64(m.q) }
}

/// Largest initial difference quotient over `(h, U, V)`, used to scale detection thresholds.
pub fn initial_gradient<T: Real>(s: &RadialState<T>) -> T {
    let dr = s.dr();
    let mut g = T::zero();
    for i in 1..s.len() {
        for (a, b) in [(s.h[i], s.h[i - 1]), (s.u[i], s.u[i - 1]), (s.v[i], s.v[i - 1])] {
            g = g.max((a - b).abs() / dr);
        }
    }
    g
}

/// Evolves `initial` until the horizon or a detection, recording diagnostics at every output.
///
/// Errors raised inside the loop (a path leaving the domain, a trace outside its span) end the
/// run with an `error` termination rather than discarding the data gathered so far.
pub fn evolve_radial<T: Real>(
    initial: &RadialState<T>,
    scheme: RadialScheme<T>,
    boundary: RadialBoundary<'_, T>,
    plan: &RunPlan<T>,
) -> Result<RadialEvolution<T>> {
    initial.audit()?;
    if !(plan.horizon > T::zero()) || !(plan.interval > T::zero()) {
        return Err(Error::InvalidArgument("horizon and output interval must be positive".into()));
    }
    let grid = initial.grid();
    let stepper = Stepper::new(&grid, initial.h_bar, scheme, boundary)?;
    let n = stepper.n;
    let offset = plan.path_offset.unwrap_or(stepper.dr);
    let tiny = initial.h_bar * lit(1e-12);

    let mut y = pack(initial);
    for &x0 in &plan.track_paths {
        y.extend([x0 - offset, x0, x0 + offset]);
    }
    let mut paths = (!plan.track_paths.is_empty()).then(|| PathHistory {
        labels: plan.track_paths.clone(),
        offset,
        times: Vec::new(),
        positions: Vec::new(),
        h: Vec::new(),
        u: Vec::new(),
        v: Vec::new(),
    });

    let ms0 = moments_radial(initial);
    let mut diagnostics = Vec::new();
    let mut snapshots = vec![initial.clone()];
    let mut angular0: Vec<T> = Vec::new();

    let mut record = |t: T, dt: T, y: &[T], paths: &mut Option<PathHistory<T>>, out: &mut Vec<StepDiagnostics>| -> Result<RadialState<T>> {
        let state = unpack(initial, y, t, tiny);
        let ms = moments_radial(&state);
        let (g, _) = stepper.gradients(y);
        let mut drifts = BTreeMap::new();
        drifts.insert("mass".to_string(), to_f64(ms.m - ms0.m));
        drifts.insert("energy".to_string(), to_f64(ms.e - ms0.e));
        if let Some(p) = paths.as_mut() {
            let e = stepper.extend(t, &y[..n], &y[n..2 * n], &y[2 * n..3 * n])?;
            let xs = y[3 * n..].to_vec();
            let mut hs = Vec::new();
            let mut us = Vec::new();
            let mut vs = Vec::new();
            let mut worst = T::zero();
            for (k, &x0) in p.labels.iter().enumerate() {
                let x = xs[3 * k + 1];
                let missing = || Error::PathExitedDomain { label: to_f64(x0), position: to_f64(x) };
                let h = stepper.interpolate(&e.h, x).ok_or_else(missing)?;
                let u = stepper.interpolate(&e.u, x).ok_or_else(missing)?;
                let v = stepper.interpolate(&e.v, x).ok_or_else(missing)?;
                let a = x * v + lit::<T>(0.5) * x * x;
                if angular0.len() <= k {
                    angular0.push(a);
                }
                worst = worst.max((a - angular0[k]).abs());
                hs.push(h);
                us.push(u);
                vs.push(v);
            }
            drifts.insert("angular_momentum".to_string(), to_f64(worst));
            p.times.push(t);
            p.positions.push(xs);
            p.h.push(hs);
            p.u.push(us);
            p.v.push(vs);
        }
        out.push(StepDiagnostics {
            t: to_f64(t),
            dt: to_f64(dt),
            moments: Some(moments_f64(&ms)),
            max_gradient: Some(g.map(to_f64)),
            drifts,
        });
        Ok(state)
    };

    let mut t = initial.t;
    let t_end = initial.t + plan.horizon;
    let mut last_dt = T::zero();
    let mut steps = 0usize;
    let mut output = 0usize;
    let termination = 'run: {
        if let Err(e) = record(t, last_dt, &y, &mut paths, &mut diagnostics) {
            break 'run Termination::Error { t: to_f64(t), message: e.to_string() };
        }
        while t < t_end {
            output += 1;
            let target = (initial.t + plan.interval * lit(output as f64)).min(t_end);
            while t < target {
                match stepper.advance(t, &y, target - t) {
                    Err(e) => break 'run Termination::Error { t: to_f64(t), message: e.to_string() },
                    Ok(AdvanceOutcome::Detected(d)) => {
                        break 'run Termination::BlowupDetected {
                            t: to_f64(t),
                            reason: d.reason,
                            quantity: d.quantity.to_string(),
                            location: to_f64(d.location),
                            value: to_f64(d.value),
                        }
                    }
                    Ok(AdvanceOutcome::Advanced { y: next, dt, .. }) => {
                        y = next;
                        t = if dt == target - t { target } else { t + dt };
                        last_dt = dt;
                        steps += 1;
                    }
                }
            }
            match record(t, last_dt, &y, &mut paths, &mut diagnostics) {
                Err(e) => break 'run Termination::Error { t: to_f64(t), message: e.to_string() },
                Ok(state) => {
                    if plan.snapshot_every > 0 && output % plan.snapshot_every == 0 {
                        snapshots.push(state);
                    }
                }
            }
        }
        Termination::Horizon { t: to_f64(t) }
    };
    let final_state = unpack(initial, &y, t, tiny);
    if snapshots.last().map(|s| s.t) != Some(final_state.t) {
        snapshots.push(final_state.clone());
    }
    Ok(RadialEvolution { diagnostics, termination, snapshots, paths, final_state, steps, scheme })
}

/// A complete radial scenario: its record plus stored states and paths.
#[derive(Clone, Debug)]
pub struct RadialRun<T> {
    pub record: RunRecord,
    pub snapshots: Vec<RadialState<T>>,
    pub paths: Option<PathHistory<T>>,
    pub final_state: RadialState<T>,
}

/// Fitted growth of the largest gradient before a detection, assuming it blows up at the
/// detection time.
fn gradient_growth(diags: &[StepDiagnostics], t0: f64) -> BTreeMap<String, crate::separated::PowerFit<f64>> {
    let samples: Vec<(f64, f64)> = diags
        .iter()
        .filter_map(|d| {
            let g = d.max_gradient?.iter().copied().fold(0.0, f64::max);
            (t0 - d.t > 0.0 && g > 0.0).then_some((t0 - d.t, g))
        })
        .collect();
    let tail = &samples[samples.len() / 2..];
    let mut rates = BTreeMap::new();
    if tail.len() >= 3 {
        let (gaps, vals): (Vec<f64>, Vec<f64>) = tail.iter().copied().unzip();
        rates.insert("max_gradient".to_string(), power_fit(&gaps, &vals));
    }
    rates
}

/// Validates and runs a radial scenario.
pub fn run_radial<T: Real>(cfg: &ScenarioConfig) -> Result<RadialRun<T>> {
    let cfg = validate_config(cfg)?;
    let Some(GridSpec::Radial { r_min, r_max, cells }) = cfg.grid else {
        return Err(Error::InvalidConfig(vec!["radial run needs a radial grid".into()]));
    };
    let grid = RadialGrid::new(lit::<T>(r_min), lit(r_max), cells)?;
    let h_bar = lit::<T>(cfg.h_bar);
    let initial = build_initial_radial(&cfg.initial, &grid, h_bar)?;

    let trace_source = if cfg.initial.profile == "separated_trace" {
        let opts = TraceOptions {
            tol: lit(cfg.solver.tol),
            escape_threshold: lit(cfg.solver.escape_threshold),
            max_step: Some(lit(0.01)),
        };
        let p = |k: &str| lit::<T>(cfg.initial.param(k, 0.0));
        let horizon = lit::<T>(cfg.horizon) * lit(1.01);
        Some(SeparatedTrace { trajectory: trace(p("g0"), p("xi0"), p("eta0"), horizon, &opts)? })
    } else {
        None
    };
    let boundary = match &trace_source {
        Some(src) => RadialBoundary::Dirichlet(src),
        None => RadialBoundary::FarField,
    };

    let mut scheme = RadialScheme::from_options(&cfg.solver);
    if cfg.solver.gradient_threshold.is_none() {
        let g0 = initial_gradient(&initial);
        if g0 > T::zero() {
            scheme.gradient_threshold = [g0 * lit(cfg.solver.gradient_factor); 3];
        }
    }
    let plan = RunPlan {
        horizon: lit(cfg.horizon),
        interval: lit(cfg.output.interval.unwrap_or(cfg.horizon / 100.0)),
        snapshot_every: cfg.output.snapshot_every,
        track_paths: cfg.output.track_paths.iter().map(|&x| lit(x)).collect(),
        path_offset: None,
    };
    let evo = evolve_radial(&initial, scheme, boundary, &plan)?;
    let blowup = match evo.termination {
        Termination::BlowupDetected { t, .. } => Some(BlowupSummary { t0: t, rates: gradient_growth(&evo.diagnostics, t) }),
        _ => None,
    };
    let record = RunRecord {
        scheme: SchemeMeta {
            solver: "radial".into(),
            flux: format!("{:?}", cfg.solver.flux).to_lowercase(),
            order: cfg.solver.order,
            cfl: cfg.solver.cfl,
            scalar: std::any::type_name::<T>().into(),
            cells: vec![cells],
            spacing: to_f64(grid.dr()),
            gradient_threshold: to_f64(scheme.gradient_threshold[0]),
            dt_floor: cfg.solver.dt_floor,
            steps: evo.steps,
        },
        config: cfg,
        diagnostics: evo.diagnostics,
        termination: evo.termination,
        blowup,
    };
    Ok(RadialRun { record, snapshots: evo.snapshots, paths: evo.paths, final_state: evo.final_state })
}

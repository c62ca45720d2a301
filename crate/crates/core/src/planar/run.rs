use std::collections::BTreeMap;

use crate::diagnostics::{moment_forecast, moments_planar};
use crate::error::{Error, Result};
use crate::model::{
    build_initial_planar, validate_config, BlowupSummary, GridSpec, MomentSet, PlanarState, RunRecord, ScenarioConfig,
    SchemeMeta, StepDiagnostics, Termination,
};
use crate::radial::{RadialScheme, RunPlan};
use crate::scalar::{lit, to_f64, Real};

use super::scheme::{pack, unpack, PlanarAdvance, PlanarBoundary, PlanarStepper};

/// Everything a planar evolution produced.
#[derive(Clone, Debug)]
pub struct PlanarEvolution<T> {
    pub diagnostics: Vec<StepDiagnostics>,
    pub termination: Termination,
    pub snapshots: Vec<PlanarState<T>>,
    pub final_state: PlanarState<T>,
    pub steps: usize,
}

/// Largest initial difference quotient of `(h, u, v)` along either axis.
pub fn initial_gradient_planar<T: Real>(s: &PlanarState<T>) -> T {
    let stepper = PlanarStepper::new(s, RadialScheme::default(), PlanarBoundary::FarField).expect("default scheme");
    stepper.gradients(&pack(s)).0.iter().fold(T::zero(), |m, &g| m.max(g))
}

fn moments_f64<T: Real>(m: &MomentSet<T>) -> MomentSet<f64> {
    MomentSet { p1: to_f64(m.p1), p2: to_f64(m.p2), e: to_f64(m.e), m: to_f64(m.m), p: to_f64(m.p), q: to_f64(m.q) }
}

/// Evolves a planar state until the horizon or a detection. Path tracking in `plan` is ignored.
pub fn evolve_planar<T: Real>(
    initial: &PlanarState<T>,
    scheme: RadialScheme<T>,
    boundary: PlanarBoundary,
    plan: &RunPlan<T>,
) -> Result<PlanarEvolution<T>> {
    initial.audit()?;
    if !(plan.horizon > T::zero()) || !(plan.interval > T::zero()) {
        return Err(Error::InvalidArgument("horizon and output interval must be positive".into()));
    }
    let stepper = PlanarStepper::new(initial, scheme, boundary)?;
    let ms0 = moments_planar(initial);
    let mut diagnostics = Vec::new();
    let mut snapshots = vec![initial.clone()];
    let mut y = pack(initial);

    let record = |t: T, dt: T, y: &[T], out: &mut Vec<StepDiagnostics>| -> PlanarState<T> {
        let state = unpack(initial, y, t);
        let ms = moments_planar(&state);
        let (p1, p2) = moment_forecast(&ms0, t - initial.t);
        let (g, _) = stepper.gradients(y);
        let mut drifts = BTreeMap::new();
        drifts.insert("mass".to_string(), to_f64(ms.m - ms0.m));
        drifts.insert("energy".to_string(), to_f64(ms.e - ms0.e));
        drifts.insert("forecast_p1".to_string(), to_f64(ms.p1 - p1));
        drifts.insert("forecast_p2".to_string(), to_f64(ms.p2 - p2));
        drifts.insert("ring".to_string(), to_f64(state.ring_deviation()));
        out.push(StepDiagnostics {
            t: to_f64(t),
            dt: to_f64(dt),
            moments: Some(moments_f64(&ms)),
            max_gradient: Some(g.map(to_f64)),
            drifts,
        });
        state
    };

    let mut t = initial.t;
    let t_end = initial.t + plan.horizon;
    let mut last_dt = T::zero();
    let mut steps = 0usize;
    let mut output = 0usize;
    record(t, last_dt, &y, &mut diagnostics);
    let termination = 'run: {
        while t < t_end {
            output += 1;
            let target = (initial.t + plan.interval * lit(output as f64)).min(t_end);
            while t < target {
                match stepper.advance(&y, target - t) {
                    Err(e) => break 'run Termination::Error { t: to_f64(t), message: e.to_string() },
                    Ok(PlanarAdvance::Detected(d)) => {
                        break 'run Termination::BlowupDetected {
                            t: to_f64(t),
                            reason: d.reason,
                            quantity: d.quantity.to_string(),
                            location: to_f64(d.location),
                            value: to_f64(d.value),
                        }
                    }
                    Ok(PlanarAdvance::Advanced { y: next, dt, .. }) => {
                        y = next;
                        t = if dt == target - t { target } else { t + dt };
                        last_dt = dt;
                        steps += 1;
                    }
                }
            }
            let state = record(t, last_dt, &y, &mut diagnostics);
            if plan.snapshot_every > 0 && output % plan.snapshot_every == 0 {
                snapshots.push(state);
            }
        }
        Termination::Horizon { t: to_f64(t) }
    };
    let final_state = unpack(initial, &y, t);
    if snapshots.last().map(|s| s.t) != Some(final_state.t) {
        snapshots.push(final_state.clone());
    }
    Ok(PlanarEvolution { diagnostics, termination, snapshots, final_state, steps })
}

/// A complete planar scenario.
#[derive(Clone, Debug)]
pub struct PlanarRun<T> {
    pub record: RunRecord,
    pub snapshots: Vec<PlanarState<T>>,
    pub final_state: PlanarState<T>,
}

/// Validates and runs a planar scenario with the far-field boundary.
pub fn run_planar<T: Real>(cfg: &ScenarioConfig) -> Result<PlanarRun<T>> {
    let cfg = validate_config(cfg)?;
    let Some(GridSpec::Planar { half_width, nx, ny }) = cfg.grid else {
        return Err(Error::InvalidConfig(vec!["planar run needs a planar grid".into()]));
    };
    let initial = build_initial_planar(&cfg.initial, lit::<T>(half_width), nx, ny, lit(cfg.h_bar))?;
    let mut scheme = RadialScheme::from_options(&cfg.solver);
    if cfg.solver.gradient_threshold.is_none() {
        let g0 = initial_gradient_planar(&initial);
        if g0 > T::zero() {
            scheme.gradient_threshold = [g0 * lit(cfg.solver.gradient_factor); 3];
        }
    }
    let plan = RunPlan {
        horizon: lit(cfg.horizon),
        interval: lit(cfg.output.interval.unwrap_or(cfg.horizon / 100.0)),
        snapshot_every: cfg.output.snapshot_every,
        track_paths: Vec::new(),
        path_offset: None,
    };
    let evo = evolve_planar(&initial, scheme, PlanarBoundary::FarField, &plan)?;
    let blowup = match evo.termination {
        Termination::BlowupDetected { t, .. } => Some(BlowupSummary { t0: t, rates: BTreeMap::new() }),
        _ => None,
    };
    let record = RunRecord {
        scheme: SchemeMeta {
            solver: "planar".into(),
            flux: format!("{:?}", cfg.solver.flux).to_lowercase(),
            order: cfg.solver.order,
            cfl: cfg.solver.cfl,
            scalar: std::any::type_name::<T>().into(),
            cells: vec![nx, ny],
            spacing: to_f64(initial.dx),
            gradient_threshold: to_f64(scheme.gradient_threshold[0]),
            dt_floor: cfg.solver.dt_floor,
            steps: evo.steps,
        },
        config: cfg,
        diagnostics: evo.diagnostics,
        termination: evo.termination,
        blowup,
    };
    Ok(PlanarRun { record, snapshots: evo.snapshots, final_state: evo.final_state })
}

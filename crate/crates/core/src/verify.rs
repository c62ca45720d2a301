//! Self-contained property suites behind `rsw verify`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::diagnostics::{moment_forecast, moment_residuals, moments_planar};
use crate::error::{Error, Result};
use crate::model::{build_initial_planar, build_initial_radial, FluxKind, InitialData, PlanarState, RadialGrid, RadialState};
use crate::planar::{evolve_planar, rotate_quarter, step2d, PlanarBoundary, PlanarOutcome};
use crate::radial::{evolve_radial, lagrangian_probe, step, RadialBoundary, RadialScheme, RunPlan, StepOutcome};
use crate::separated::{blowup_time, initial_from_kappa, kappa, period_integral, theta, trace, TraceOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Separated,
    Moments,
    Solver,
    Lagrangian,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Separated, Suite::Moments, Suite::Solver, Suite::Lagrangian];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Separated => "separated",
            Suite::Moments => "moments",
            Suite::Solver => "solver",
            Suite::Lagrangian => "lagrangian",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?} (separated, moments, solver, lagrangian)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = (Suite, &Check)> {
        self.suites.iter().flat_map(|s| s.checks.iter().filter(|c| !c.passed).map(move |c| (s.suite, c)))
    }
}

/// Runs the requested suites (all of them when `suites` is empty).
pub fn verify(suites: &[Suite]) -> VerifyReport {
    let chosen: Vec<Suite> = if suites.is_empty() { Suite::ALL.to_vec() } else { suites.to_vec() };
    let suites: Vec<SuiteReport> = chosen.into_iter().map(run_suite).collect();
    VerifyReport { passed: suites.iter().all(|s| s.passed), suites }
}

pub fn run_suite(suite: Suite) -> SuiteReport {
    let checks: Vec<(&str, Result<(bool, String)>)> = match suite {
        Suite::Separated => vec![
            ("kappa_drift", kappa_drift()),
            ("period_closure", period_closure()),
            ("period_integral", period_integral_check()),
            ("blowup_time_consistency", blowup_consistency()),
        ],
        Suite::Moments => vec![
            ("rest_moments_vanish", rest_moments()),
            ("forecast_initial_value", forecast_initial()),
            ("moment_ode_residual", moment_ode()),
        ],
        Suite::Solver => vec![
            ("radial_rest_fixed_point", radial_rest()),
            ("planar_rest_fixed_point", planar_rest()),
            ("radial_mass_telescopes", radial_mass()),
            ("planar_rotation_equivariance", planar_rotation()),
        ],
        Suite::Lagrangian => vec![("rest_paths_static", rest_paths()), ("invariant_drift_refines", invariant_drift())],
    };
    let checks: Vec<Check> = checks
        .into_iter()
        .map(|(name, r)| match r {
            Ok((passed, detail)) => Check { name: name.into(), passed, detail },
            Err(e) => Check { name: name.into(), passed: false, detail: format!("error: {e}") },
        })
        .collect();
    SuiteReport { suite, passed: checks.iter().all(|c| c.passed), checks }
}

fn kappa_drift() -> Result<(bool, String)> {
    let opts = TraceOptions::default();
    let mut worst = 0.0f64;
    for xi0 in [-2.5f64, -1.0, 0.0, 0.7, 2.0] {
        for eta0 in [-1.5, 0.3, 1.2, 2.8] {
            if theta(xi0, eta0).abs() < 1e-3 {
                continue;
            }
            let k0: f64 = kappa(xi0, eta0).expect("theta is nonzero");
            let traj = trace(0.0, xi0, eta0, std::f64::consts::TAU, &opts)?;
            worst = worst.max(traj.max_kappa_drift() / (1.0 + k0.abs()));
        }
    }
    Ok((worst <= 1e-8, format!("max |kappa - kappa0|/(1 + |kappa0|) = {worst:.3e}")))
}

fn period_closure() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for k0 in [0.25, 0.5, 0.75] {
        let (xi0, eta0) = initial_from_kappa(k0, 0.4, true).expect("kappa0 in (0, 1)");
        let traj = trace(0.0, xi0, eta0, std::f64::consts::TAU, &TraceOptions::default())?;
        let end = traj.state_at(std::f64::consts::TAU)?;
        worst = worst.max((end.xi - xi0).hypot(end.eta - eta0));
    }
    Ok((worst <= 1e-6, format!("max |(xi, eta)(2pi) - (xi, eta)(0)| = {worst:.3e}")))
}

fn period_integral_check() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for k in 1..10 {
        let v = period_integral(k as f64 / 10.0, 1e-10)?;
        worst = worst.max((v - std::f64::consts::PI).abs());
    }
    Ok((worst <= 1e-8, format!("max |integral - pi| = {worst:.3e}")))
}

fn blowup_consistency() -> Result<(bool, String)> {
    let mut cases = 0;
    for k0 in [0.0, -1.0, -3.0] {
        for xi0 in [0.5, -0.5] {
            let (x, e) = initial_from_kappa(k0, xi0, true).expect("kappa0 <= 0 has a positive branch");
            blowup_time(x, e, 1e-10)?;
            cases += 1;
        }
    }
    let t_tan = blowup_time(0.0, 1.0, 1e-10)?;
    let t_zero = blowup_time(0.0, 0.5, 1e-10)?;
    let err = (t_tan - std::f64::consts::FRAC_PI_2).abs().max((t_zero - std::f64::consts::PI).abs());
    Ok((err <= 1e-6, format!("{cases} quadrature/escape pairs agree; explicit-case error {err:.3e}")))
}

fn rest_moments() -> Result<(bool, String)> {
    let ms = moments_planar(&PlanarState::<f64>::rest(3.0, 32, 32, 1.0));
    let size = ms.p1.abs() + ms.p2.abs() + ms.e.abs() + ms.m.abs();
    Ok((size == 0.0, format!("|P1| + |P2| + |E| + |m| = {size:e}")))
}

fn swirl(n: usize) -> Result<PlanarState<f64>> {
    let init = InitialData::new("offset_bump")
        .with("h_amp", 0.2)
        .with("u_amp", 0.3)
        .with("swirl", 0.5)
        .with("radial", 0.3)
        .with("center_x", 0.3)
        .with("center_y", 0.2)
        .with("width", 0.8);
    build_initial_planar(&init, 3.0, n, n, 1.0)
}

fn forecast_initial() -> Result<(bool, String)> {
    let ms = moments_planar(&swirl(32)?);
    let (p1, p2) = moment_forecast(&ms, 0.0);
    let err = (p1 - ms.p1).abs().max((p2 - ms.p2).abs());
    Ok((err <= 1e-12 * (1.0 + ms.e.abs()), format!("forecast at t = 0 off by {err:.3e}")))
}

fn moment_ode() -> Result<(bool, String)> {
    let s = swirl(64)?;
    let evo = evolve_planar(&s, RadialScheme::default(), PlanarBoundary::FarField, &RunPlan::new(0.5, 50))?;
    let times: Vec<f64> = evo.diagnostics.iter().map(|d| d.t).collect();
    let moments: Vec<_> = evo.diagnostics.iter().filter_map(|d| d.moments).collect();
    let r = moment_residuals(&times, &moments)?;
    let rel = r.relative();
    let mass = r.mass_drift / moments[0].m.abs();
    Ok((
        rel <= 5e-2 && mass <= 1e-10,
        format!("relative residual {rel:.3e} on 64x64 (bound 5e-2), relative mass drift {mass:.3e}"),
    ))
}

fn radial_rest() -> Result<(bool, String)> {
    let grid = RadialGrid::new(0.0, 3.0, 60)?;
    let mut fixed = true;
    for flux in [FluxKind::Rusanov, FluxKind::Hll] {
        for order in [1, 2] {
            let s = RadialState::rest(&grid, 1.5);
            let scheme = RadialScheme { flux, order, ..RadialScheme::default() };
            match step(&s, &scheme, RadialBoundary::FarField, 1.0)? {
                StepOutcome::Advanced { state, .. } => fixed &= state.h == s.h && state.u == s.u && state.v == s.v,
                StepOutcome::Detected(_) => fixed = false,
            }
        }
    }
    Ok((fixed, "rest state unchanged by one step for both fluxes and orders".into()))
}

fn planar_rest() -> Result<(bool, String)> {
    let s = PlanarState::rest(2.0, 24, 24, 1.5);
    let fixed = match step2d(&s, &RadialScheme::default(), PlanarBoundary::FarField, 1.0)? {
        PlanarOutcome::Advanced { state, .. } => state.h == s.h && state.hu == s.hu && state.hv == s.hv,
        PlanarOutcome::Detected(_) => false,
    };
    Ok((fixed, "planar rest state unchanged by one step".into()))
}

fn radial_mass() -> Result<(bool, String)> {
    let grid = RadialGrid::new(0.0, 4.0, 160)?;
    let init = InitialData::new("bump").with("h_amp", 0.5).with("u_amp", -1.0).with("v_amp", 0.7);
    let mut s = build_initial_radial(&init, &grid, 1.0)?;
    let mass = |s: &RadialState<f64>| s.h.iter().zip(&s.r_centers).map(|(&h, &r)| (h - s.h_bar) * r).sum::<f64>();
    let m0 = mass(&s);
    let mut worst = 0.0f64;
    for _ in 0..40 {
        s = match step(&s, &RadialScheme::default(), RadialBoundary::FarField, 1.0)? {
            StepOutcome::Advanced { state, .. } => state,
            StepOutcome::Detected(d) => return Ok((false, format!("unexpected detection {d:?}"))),
        };
        worst = worst.max(((mass(&s) - m0) / m0).abs());
    }
    Ok((worst <= 1e-12, format!("max relative mass change over 40 steps {worst:.3e}")))
}

fn planar_rotation() -> Result<(bool, String)> {
    let s = swirl(32)?;
    let scheme = RadialScheme::default();
    let advance = |s: &PlanarState<f64>| -> Result<PlanarState<f64>> {
        match step2d(s, &scheme, PlanarBoundary::FarField, 0.05)? {
            PlanarOutcome::Advanced { state, .. } => Ok(state),
            PlanarOutcome::Detected(d) => Err(Error::PostCondition(format!("unexpected detection {d:?}"))),
        }
    };
    let a = rotate_quarter(&advance(&s)?)?;
    let b = advance(&rotate_quarter(&s)?)?;
    let diff = a
        .h
        .iter()
        .zip(&b.h)
        .chain(a.hu.iter().zip(&b.hu))
        .chain(a.hv.iter().zip(&b.hv))
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    Ok((diff <= 1e-12, format!("step and quarter rotation commute to {diff:.3e}")))
}

fn rest_paths() -> Result<(bool, String)> {
    let grid = RadialGrid::<f64>::new(0.0, 2.0, 80)?;
    let s = RadialState::rest(&grid, 1.0);
    let plan = RunPlan { track_paths: vec![0.5, 1.0, 1.5], ..RunPlan::new(0.2, 4) };
    let evo = evolve_radial(&s, RadialScheme::default(), RadialBoundary::FarField, &plan)?;
    let paths = evo.paths.ok_or_else(|| Error::PostCondition("no paths recorded".into()))?;
    let rep = lagrangian_probe(&paths)?;
    let worst = rep.max_angular_momentum.max(rep.max_mass).max(rep.max_reconstruction);
    Ok((worst == 0.0, format!("largest invariant drift on rest data {worst:e}")))
}

fn invariant_drift() -> Result<(bool, String)> {
    let init = InitialData::new("bump").with("h_amp", 0.2).with("u_amp", -0.2).with("v_amp", 0.2);
    let mut drift = Vec::new();
    for cells in [150, 300] {
        let grid = RadialGrid::new(0.0, 3.0, cells)?;
        let s = build_initial_radial(&init, &grid, 1.0)?;
        let plan = RunPlan { track_paths: vec![0.6, 1.0, 1.4], ..RunPlan::new(0.3, 30) };
        let evo = evolve_radial(&s, RadialScheme::default(), RadialBoundary::FarField, &plan)?;
        if evo.termination.name() != "horizon" {
            return Ok((false, format!("run ended with {}", evo.termination.name())));
        }
        let paths = evo.paths.ok_or_else(|| Error::PostCondition("no paths recorded".into()))?;
        let rep = lagrangian_probe(&paths)?;
        drift.push((rep.max_angular_momentum, rep.max_mass));
    }
    let shrinks = drift[1].0 < drift[0].0 && drift[1].1 < drift[0].1;
    Ok((
        shrinks,
        format!(
            "angular momentum {:.3e} -> {:.3e}, mass {:.3e} -> {:.3e} (150 -> 300 cells)",
            drift[0].0, drift[1].0, drift[0].1, drift[1].1
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn separated_suite_passes() {
        let r = run_suite(Suite::Separated);
        assert!(r.passed, "{:#?}", r.checks);
    }

    #[test]
    fn solver_suite_passes() {
        let r = run_suite(Suite::Solver);
        assert!(r.passed, "{:#?}", r.checks);
    }
}

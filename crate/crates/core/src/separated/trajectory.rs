use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, OdeOptions, OdeSolution, OdeTermination};
use crate::scalar::{lit, to_f64, Real};

use super::{classify, kappa_from_theta, rhs_g_xi_theta, theta, Regime, SeparatedState};

#[derive(Clone, Debug)]
pub struct TraceOptions<T> {
    /// Relative and absolute ODE tolerance.
    pub tol: T,
    /// Blowup runs stop once `|ϑ|` (or `|ξ|` on the tangent branch) exceeds this.
    pub escape_threshold: T,
    /// Cap on the ODE step, for callers that need accurate dense output.
    pub max_step: Option<T>,
}

impl<T: Real> Default for TraceOptions<T> {
    fn default() -> Self {
        Self { tol: lit(1e-10), escape_threshold: lit(1e6), max_step: None }
    }
}

/// An integrated separated solution.
///
/// Internally the ODE state is `(g, ξ, ϑ)`; [`SeparatedTrajectory::states`] exposes `(g, ξ, η)`.
#[derive(Clone, Debug)]
pub struct SeparatedTrajectory<T> {
    pub solution: OdeSolution<T>,
    pub regime: Regime<T>,
    pub theta0: T,
    /// `|κ(t) − κ₀|` per sample; empty on the tangent branch.
    pub kappa_drift: Vec<T>,
    /// `|(g − ln|ϑ|) − (g₀ − ln|ϑ₀|)|` per sample; empty on the tangent branch.
    pub theta_link_residual: Vec<T>,
    /// Bisected crossing time of the escape threshold, for blowup regimes.
    pub escape_time: Option<T>,
}

impl<T: Real> SeparatedTrajectory<T> {
    pub fn times(&self) -> &[T] {
        &self.solution.times
    }

    pub fn len(&self) -> usize {
        self.solution.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solution.times.is_empty()
    }

    fn to_state(t: T, y: &[T]) -> SeparatedState<T> {
        let (g, xi, th) = (y[0], y[1], y[2]);
        SeparatedState { t, g, xi, eta: xi * xi + T::one() - th }
    }

    pub fn state(&self, i: usize) -> SeparatedState<T> {
        Self::to_state(self.solution.times[i], &self.solution.states[i])
    }

    pub fn states(&self) -> Vec<SeparatedState<T>> {
        (0..self.len()).map(|i| self.state(i)).collect()
    }

    /// `ϑ` as integrated (not recomputed from `η`).
    pub fn theta_at(&self, i: usize) -> T {
        self.solution.states[i][2]
    }

    pub fn g_at(&self, i: usize) -> T {
        self.solution.states[i][0]
    }

    pub fn xi_at(&self, i: usize) -> T {
        self.solution.states[i][1]
    }

    pub fn first(&self) -> SeparatedState<T> {
        self.state(0)
    }

    pub fn last(&self) -> SeparatedState<T> {
        self.state(self.len() - 1)
    }

    /// Dense state at time `t` (Hermite interpolation between accepted steps).
    pub fn state_at(&self, t: T) -> Result<SeparatedState<T>> {
        let y = self.solution.dense(t).ok_or_else(|| Error::OutsideSpan {
            t: to_f64(t),
            start: to_f64(self.solution.times[0]),
            end: to_f64(self.solution.last_time()),
        })?;
        Ok(Self::to_state(t, &y))
    }

    pub fn max_kappa_drift(&self) -> T {
        self.kappa_drift.iter().fold(T::zero(), |m, &d| m.max(d))
    }
}

/// Integrates the reduced dynamics from `(g₀, ξ₀, η₀)` to `horizon`.
///
/// Blowup and tangent regimes are truncated at the escape threshold with the crossing time
/// recorded; periodic and steady regimes run to the horizon.
pub fn trace<T: Real>(g0: T, xi0: T, eta0: T, horizon: T, opts: &TraceOptions<T>) -> Result<SeparatedTrajectory<T>> {
    if !(opts.tol > T::zero()) {
        return Err(Error::InvalidArgument("trace tolerance must be positive".into()));
    }
    let regime = classify(xi0, eta0)?;
    let th0 = match regime {
        Regime::ExplicitTan { .. } => T::zero(),
        _ => theta(xi0, eta0),
    };
    let threshold = opts.escape_threshold;
    let tangent = matches!(regime, Regime::ExplicitTan { .. });
    let blowup = regime.is_blowup();
    let mut ode_opts = OdeOptions::with_tol(opts.tol);
    ode_opts.h_min = lit(1e-15);
    if let Some(h) = opts.max_step {
        ode_opts.h_max = h;
    }
    let escape = |y: &[T]| {
        if tangent {
            y[1].abs() > threshold
        } else if blowup {
            y[2].abs() > threshold
        } else {
            false
        }
    };
    let solution = integrate_adaptive(
        |_, y: &[T], out: &mut [T]| rhs_g_xi_theta(y, out),
        &[g0, xi0, th0],
        (T::zero(), horizon),
        &ode_opts,
        escape,
    );
    if solution.termination == OdeTermination::StepUnderflow {
        return Err(Error::PostCondition(format!(
            "step underflow at t = {} while tracing ({xi0}, {eta0})",
            solution.last_time()
        )));
    }
    let (kappa_drift, theta_link_residual) = match regime.kappa0() {
        Some(k0) if !tangent => {
            let link0 = g0 - th0.abs().ln();
            solution
                .states
                .iter()
                .map(|y| {
                    let k = kappa_from_theta(y[1], y[2]);
                    ((k - k0).abs(), (y[0] - y[2].abs().ln() - link0).abs())
                })
                .unzip()
        }
        _ => (Vec::new(), Vec::new()),
    };
    let escape_time = solution.escape_time;
    Ok(SeparatedTrajectory { solution, regime, theta0: th0, kappa_drift, theta_link_residual, escape_time })
}

/// Radial position at time `t` of the particle that started at `x0`: `e^{(g(0) − g(t))/2}·x0`.
pub fn particle_path<T: Real>(x0: T, traj: &SeparatedTrajectory<T>, t: T) -> Result<T> {
    if !(x0 > T::zero()) {
        return Err(Error::InvalidArgument(format!("particle label must be positive, got {x0}")));
    }
    let g0 = traj.g_at(0);
    let g = traj.state_at(t)?.g;
    Ok(((g0 - g) * lit(0.5)).exp() * x0)
}

/// Residual series of `g(t) − ln ϑ(t) = g(0) − ln ϑ(0)`.
pub fn g_theta_link<T: Real>(traj: &SeparatedTrajectory<T>) -> Result<Vec<T>> {
    if traj.theta0 == T::zero() {
        return Err(Error::InvalidArgument("g/theta link undefined on the theta = 0 branch".into()));
    }
    Ok(traj.theta_link_residual.clone())
}

/// Extreme values of `ϑ` over the stored span, located where `ξ = ϑ'/ϑ` changes sign and refined
/// by re-integrating from the preceding sample to the sign change.
pub fn theta_extrema<T: Real>(traj: &SeparatedTrajectory<T>, tol: T) -> (T, T) {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let sol = &traj.solution;
    for y in &sol.states {
        lo = lo.min(y[2]);
        hi = hi.max(y[2]);
    }
    for i in 0..sol.states.len().saturating_sub(1) {
        let (a, b) = (sol.states[i][1], sol.states[i + 1][1]);
        if a == T::zero() || a.signum() == b.signum() {
            continue;
        }
        let sign = a.signum();
        let mut opts = OdeOptions::with_tol(tol);
        opts.h_init = Some(sol.step_sizes[i] * lit(0.5));
        let refined = integrate_adaptive(
            |_, y: &[T], out: &mut [T]| rhs_g_xi_theta(y, out),
            &sol.states[i],
            (sol.times[i], sol.times[i + 1] + sol.step_sizes[i]),
            &opts,
            |y: &[T]| y[1] * sign <= T::zero(),
        );
        let th = refined.last_state()[2];
        lo = lo.min(th);
        hi = hi.max(th);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn equilibrium_trace_is_constant() {
        let traj = trace(0.4, 0.0, 0.0, 10.0, &TraceOptions::default()).unwrap();
        for s in traj.states() {
            assert_eq!((s.g, s.xi, s.eta), (0.4, 0.0, 0.0));
        }
        assert!(traj.escape_time.is_none());
        assert_eq!(traj.last().t, 10.0);
    }

    #[test]
    fn periodic_trace_closes_after_two_pi() {
        let traj = trace(0.0, 0.5, 0.25, 2.0 * PI, &TraceOptions::default()).unwrap();
        let (a, b) = (traj.first(), traj.last());
        assert!((a.xi - b.xi).abs() < 1e-6 && (a.eta - b.eta).abs() < 1e-6);
        assert!((a.g - b.g).abs() < 1e-6);
        assert!(traj.max_kappa_drift() < 1e-8);
    }

    #[test]
    fn tangent_trace_escapes_before_half_pi() {
        let traj = trace(0.0, 0.0, 1.0, 2.0, &TraceOptions::default()).unwrap();
        let esc = traj.escape_time.unwrap();
        assert!(esc < PI / 2.0 + 1e-10);
        assert!((esc - (PI / 2.0 - 1e-6)).abs() < 1e-9);
        for s in traj.states().iter().filter(|s| s.t <= 1.4) {
            assert!((s.xi - s.t.tan()).abs() < 1e-6);
        }
    }

    #[test]
    fn particle_paths() {
        let eq = trace(0.0, 0.0, 0.0, 5.0, &TraceOptions::default()).unwrap();
        assert_eq!(particle_path(1.5, &eq, 0.0).unwrap(), 1.5);
        assert_eq!(particle_path(1.5, &eq, 3.3).unwrap(), 1.5);
        let bl = trace(0.0, 2.0, 4.0, 5.0, &TraceOptions::default()).unwrap();
        let t_end = bl.last().t;
        assert!(particle_path(1.0, &bl, t_end).unwrap() < 2e-3);
        assert!(particle_path(1.0, &bl, t_end + 0.1).is_err());
        assert!(particle_path(-1.0, &bl, 0.0).is_err());
    }

    #[test]
    fn g_theta_link_holds() {
        let eq = trace(0.0, 0.0, 0.0, 5.0, &TraceOptions::default()).unwrap();
        assert!(g_theta_link(&eq).unwrap().iter().all(|&r| r == 0.0));
        let per = trace(0.0, 0.5, 0.25, 2.0 * PI, &TraceOptions::default()).unwrap();
        assert!(g_theta_link(&per).unwrap().iter().all(|&r| r <= 1e-8));
        let bl = trace(0.0, 2.0, 4.0, 5.0, &TraceOptions::default()).unwrap();
        assert!(g_theta_link(&bl).unwrap().iter().all(|&r| r <= 1e-6));
        let tan = trace(0.0, 0.0, 1.0, 2.0, &TraceOptions::default()).unwrap();
        assert!(g_theta_link(&tan).is_err());
    }
}

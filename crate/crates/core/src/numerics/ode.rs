use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Real};

/// Why an integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OdeTermination {
    Horizon,
    EscapeThreshold,
    StepUnderflow,
    MaxSteps,
}

#[derive(Clone, Debug)]
pub struct OdeOptions<T> {
    pub rtol: T,
    pub atol: T,
    /// Initial step; estimated from the vector field when absent.
    pub h_init: Option<T>,
    /// Step floor; reaching it ends the run with [`OdeTermination::StepUnderflow`].
    pub h_min: T,
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Real> OdeOptions<T> {
    /// Same relative and absolute tolerance.
    pub fn with_tol(tol: T) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h_init: None,
            h_min: lit(1e-14),
            h_max: T::infinity(),
            max_steps: 1_000_000,
        }
    }
}

impl<T: Real> Default for OdeOptions<T> {
    fn default() -> Self {
        Self::with_tol(lit(1e-10))
    }
}

/// Accepted samples of an adaptive integration.
#[derive(Clone, Debug)]
pub struct OdeSolution<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    /// Vector field at each sample, kept for Hermite dense output.
    pub derivatives: Vec<Vec<T>>,
    /// Size of each accepted step (one fewer than `times`).
    pub step_sizes: Vec<T>,
    pub accepted: usize,
    pub rejected: usize,
    pub termination: OdeTermination,
    /// Crossing time of the escape predicate, localized by bisection.
    pub escape_time: Option<T>,
}

impl<T: Real> OdeSolution<T> {
    pub fn last_time(&self) -> T {
        *self.times.last().expect("solution holds the initial sample")
    }

    pub fn last_state(&self) -> &[T] {
        self.states.last().expect("solution holds the initial sample")
    }

    /// Cubic Hermite interpolation between stored samples. `None` outside the span.
    pub fn dense(&self, t: T) -> Option<Vec<T>> {
        let first = self.times[0];
        let last = self.last_time();
        if t < first || t > last {
            return None;
        }
        let idx = match self
            .times
            .binary_search_by(|probe| probe.partial_cmp(&t).expect("finite sample times"))
        {
            Ok(i) => return Some(self.states[i].clone()),
            Err(i) => i - 1,
        };
        let (t0, t1) = (self.times[idx], self.times[idx + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let two = lit::<T>(2.0);
        let three = lit::<T>(3.0);
        let h00 = two * s3 - three * s2 + T::one();
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        let (y0, y1) = (&self.states[idx], &self.states[idx + 1]);
        let (f0, f1) = (&self.derivatives[idx], &self.derivatives[idx + 1]);
        Some(
            (0..y0.len())
                .map(|i| h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i])
                .collect(),
        )
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Trial<T> {
    y: Vec<T>,
    f: Vec<T>,
    err: T,
}

fn dp_step<T, F>(rhs: &mut F, t: T, y: &[T], f0: &[T], h: T, opts: &OdeOptions<T>) -> Trial<T>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
{
    let n = y.len();
    let mut k: Vec<Vec<T>> = Vec::with_capacity(7);
    k.push(f0.to_vec());
    let mut stage = vec![T::zero(); n];
    for s in 1..7 {
        for i in 0..n {
            let mut acc = T::zero();
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    acc = acc + lit::<T>(a) * kj[i];
                }
            }
            stage[i] = y[i] + h * acc;
        }
        let mut out = vec![T::zero(); n];
        rhs(t + lit::<T>(C[s]) * h, &stage, &mut out);
        k.push(out);
    }
    // The seventh stage argument is the fifth-order solution (FSAL).
    let y_new = stage;
    let mut err = T::zero();
    for i in 0..n {
        let mut e = T::zero();
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                e = e + lit::<T>(E[j]) * kj[i];
            }
        }
        let scale = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
        let ratio = (h * e).abs() / scale;
        if !ratio.is_finite() || !y_new[i].is_finite() {
            err = T::infinity();
        } else if ratio > err {
            err = ratio;
        }
    }
    let f_new = k.pop().expect("seven stages");
    Trial { y: y_new, f: f_new, err }
}

fn initial_step<T, F>(rhs: &mut F, t: T, y: &[T], f0: &[T], dir: T, opts: &OdeOptions<T>) -> T
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
{
    let n = y.len();
    let norm = |v: &[T]| -> T {
        let mut m = T::zero();
        for i in 0..n {
            let s = opts.atol + opts.rtol * y[i].abs();
            m = m.max((v[i] / s).abs());
        }
        m
    };
    let d0 = norm(y);
    let d1 = norm(f0);
    let tiny = lit::<T>(1e-5);
    let h0 = if d0 < tiny || d1 < tiny {
        lit::<T>(1e-6)
    } else {
        lit::<T>(0.01) * d0 / d1
    };
    let y1: Vec<T> = (0..n).map(|i| y[i] + dir * h0 * f0[i]).collect();
    let mut f1 = vec![T::zero(); n];
    rhs(t + dir * h0, &y1, &mut f1);
    let diff: Vec<T> = (0..n).map(|i| f1[i] - f0[i]).collect();
    let d2 = norm(&diff) / h0;
    let dmax = d1.max(d2);
    let h1 = if dmax <= lit(1e-15) {
        (h0 * lit(1e-3)).max(lit(1e-6))
    } else {
        (lit::<T>(0.01) / dmax).powf(lit(0.2))
    };
    (lit::<T>(100.0) * h0).min(h1).min(opts.h_max)
}

/// Integrates `y' = rhs(t, y)` over `t_span` with an embedded Dormand–Prince 5(4) pair and
/// proportional-integral step control.
///
/// The run stops early the first time `escape(y)` holds; the crossing time inside the last
/// step is then localized by bisection, re-stepping from the last accepted sample, to within
/// `rtol·max(1, |t|)`. Stored samples never include an escaped state.
pub fn integrate_adaptive<T, F, P>(
    mut rhs: F,
    y0: &[T],
    t_span: (T, T),
    opts: &OdeOptions<T>,
    mut escape: P,
) -> OdeSolution<T>
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
    P: FnMut(&[T]) -> bool,
{
    let (t0, t_end) = t_span;
    let n = y0.len();
    let mut f0 = vec![T::zero(); n];
    rhs(t0, y0, &mut f0);
    let mut sol = OdeSolution {
        times: vec![t0],
        states: vec![y0.to_vec()],
        derivatives: vec![f0.clone()],
        step_sizes: Vec::new(),
        accepted: 0,
        rejected: 0,
        termination: OdeTermination::Horizon,
        escape_time: None,
    };
    if escape(y0) {
        sol.termination = OdeTermination::EscapeThreshold;
        sol.escape_time = Some(t0);
        return sol;
    }
    if t_end == t0 {
        return sol;
    }
    let dir = if t_end > t0 { T::one() } else { -T::one() };

    let safety = lit::<T>(0.9);
    let alpha = lit::<T>(0.7 / 5.0);
    let beta = lit::<T>(0.4 / 5.0);
    let fac_min = lit::<T>(0.2);
    let fac_max = lit::<T>(10.0);

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut f = f0;
    let mut h = opts
        .h_init
        .unwrap_or_else(|| initial_step(&mut rhs, t0, y0, &f, dir, opts))
        .abs()
        .min(opts.h_max);
    let mut err_prev = lit::<T>(1e-4);
    let mut last_rejected = false;

    loop {
        if sol.accepted >= opts.max_steps {
            sol.termination = OdeTermination::MaxSteps;
            return sol;
        }
        let remaining = (t_end - t) * dir;
        let mut final_step = false;
        if h >= remaining {
            h = remaining;
            final_step = true;
        }
        if h < opts.h_min && !final_step {
            sol.termination = OdeTermination::StepUnderflow;
            return sol;
        }

        let trial = dp_step(&mut rhs, t, &y, &f, dir * h, opts);
        if trial.err <= T::one() {
            if escape(&trial.y) {
                let (s_lo, s_hi, state_lo, f_lo) =
                    bisect_escape(&mut rhs, &mut escape, t, &y, &f, h, dir, opts);
                if s_lo > T::zero() {
                    sol.times.push(t + dir * s_lo);
                    sol.states.push(state_lo);
                    sol.derivatives.push(f_lo);
                    sol.step_sizes.push(s_lo);
                    sol.accepted += 1;
                }
                sol.escape_time = Some(t + dir * lit::<T>(0.5) * (s_lo + s_hi));
                sol.termination = OdeTermination::EscapeThreshold;
                return sol;
            }
            t = if final_step { t_end } else { t + dir * h };
            y = trial.y;
            f = trial.f;
            sol.times.push(t);
            sol.states.push(y.clone());
            sol.derivatives.push(f.clone());
            sol.step_sizes.push(h);
            sol.accepted += 1;
            if final_step {
                return sol;
            }
            let err = trial.err.max(lit(1e-10));
            let mut fac = safety * err.powf(-alpha) * err_prev.powf(beta);
            fac = fac.max(fac_min).min(fac_max);
            if last_rejected {
                fac = fac.min(T::one());
            }
            h = (h * fac).min(opts.h_max);
            err_prev = err;
            last_rejected = false;
        } else {
            sol.rejected += 1;
            let fac = if trial.err.is_finite() {
                (safety * trial.err.powf(-alpha)).max(fac_min)
            } else {
                lit(0.1)
            };
            h = h * fac.min(T::one());
            last_rejected = true;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn bisect_escape<T, F, P>(
    rhs: &mut F,
    escape: &mut P,
    t: T,
    y: &[T],
    f: &[T],
    h: T,
    dir: T,
    opts: &OdeOptions<T>,
) -> (T, T, Vec<T>, Vec<T>)
where
    T: Real,
    F: FnMut(T, &[T], &mut [T]),
    P: FnMut(&[T]) -> bool,
{
    let mut lo = T::zero();
    let mut hi = h;
    let mut state_lo = y.to_vec();
    let mut f_lo = f.to_vec();
    let width = opts.rtol * T::one().max(t.abs());
    let half = lit::<T>(0.5);
    for _ in 0..200 {
        if hi - lo <= width {
            break;
        }
        let mid = half * (lo + hi);
        let trial = dp_step(rhs, t, y, f, dir * mid, opts);
        if escape(&trial.y) {
            hi = mid;
        } else {
            lo = mid;
            state_lo = trial.y;
            f_lo = trial.f;
        }
    }
    (lo, hi, state_lo, f_lo)
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MomentSet;
use crate::scalar::{lit, to_f64, Real};

/// Closed-form moments `P₁(t) = p sin t + q cos t`, `P₂(t) = −E(0) + p cos t − q sin t`.
pub fn moment_forecast<T: Real>(ms0: &MomentSet<T>, t: T) -> (T, T) {
    let (s, c) = t.sin_cos();
    (ms0.p * s + ms0.q * c, -ms0.e + ms0.p * c - ms0.q * s)
}

/// Worst deviations of a moment time series from the moment identities, with the scale
/// `|E(0)| + |P₁(0)| + |P₂(0)|` they are judged against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentResiduals {
    /// `max |P₁′ − (E + P₂)|` over interior samples.
    pub ode_p1: f64,
    /// `max |P₂′ + P₁|` over interior samples.
    pub ode_p2: f64,
    /// `max |P₁(t) − forecast|`.
    pub forecast_p1: f64,
    /// `max |P₂(t) − forecast|`.
    pub forecast_p2: f64,
    /// `max |m(t) − m(0)| / |m(0)|` (absolute when `m(0) = 0`).
    pub mass_drift: f64,
    /// `max |E(t) − E(0)| / |E(0)|` (absolute when `E(0) = 0`).
    pub energy_drift: f64,
    /// Whether `E(t)` never increased by more than roundoff between samples.
    pub energy_monotone: bool,
    pub scale: f64,
}

impl MomentResiduals {
    /// Largest of the four moment residuals relative to `scale`.
    pub fn relative(&self) -> f64 {
        let worst = self.ode_p1.max(self.ode_p2).max(self.forecast_p1).max(self.forecast_p2);
        if self.scale > 0.0 {
            worst / self.scale
        } else {
            worst
        }
    }
}

/// Derivative at `x[1]` of the parabola through three samples.
fn three_point<T: Real>(x: [T; 3], y: [T; 3]) -> T {
    let (h0, h1) = (x[1] - x[0], x[2] - x[1]);
    -y[0] * h1 / (h0 * (h0 + h1)) + y[1] * (h1 - h0) / (h0 * h1) + y[2] * h0 / (h1 * (h0 + h1))
}

/// Residuals of the moment ODE `P₁′ = E + P₂`, `P₂′ = −P₁` (time derivatives by three-point
/// differences) and of the closed-form forecast, over a moment time series starting at `t = 0`.
pub fn moment_residuals<T: Real>(times: &[T], moments: &[MomentSet<T>]) -> Result<MomentResiduals> {
    if times.len() != moments.len() || times.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "moment residuals need at least 3 matching samples, got {} times and {} moment sets",
            times.len(),
            moments.len()
        )));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("sample times must be strictly increasing".into()));
    }
    let f = to_f64::<T>;
    let ms0 = &moments[0];
    let t0 = times[0];
    let (mut ode_p1, mut ode_p2) = (0.0f64, 0.0f64);
    for k in 1..times.len() - 1 {
        let x = [times[k - 1], times[k], times[k + 1]];
        let d1 = three_point(x, [moments[k - 1].p1, moments[k].p1, moments[k + 1].p1]);
        let d2 = three_point(x, [moments[k - 1].p2, moments[k].p2, moments[k + 1].p2]);
        ode_p1 = ode_p1.max(f(d1 - (moments[k].e + moments[k].p2)).abs());
        ode_p2 = ode_p2.max(f(d2 + moments[k].p1).abs());
    }
    let rel = |a: T, b: T| {
        let d = f(a - b).abs();
        if b != T::zero() {
            d / f(b).abs()
        } else {
            d
        }
    };
    let (mut forecast_p1, mut forecast_p2, mut mass_drift, mut energy_drift) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut energy_monotone = true;
    let slack = lit::<T>(1e-12) * (ms0.e.abs() + T::one());
    for (k, (&t, ms)) in times.iter().zip(moments).enumerate() {
        let (p1, p2) = moment_forecast(ms0, t - t0);
        forecast_p1 = forecast_p1.max(f(ms.p1 - p1).abs());
        forecast_p2 = forecast_p2.max(f(ms.p2 - p2).abs());
        mass_drift = mass_drift.max(rel(ms.m, ms0.m));
        energy_drift = energy_drift.max(rel(ms.e, ms0.e));
        if k > 0 && ms.e > moments[k - 1].e + slack {
            energy_monotone = false;
        }
    }
    Ok(MomentResiduals {
        ode_p1,
        ode_p2,
        forecast_p1,
        forecast_p2,
        mass_drift,
        energy_drift,
        energy_monotone,
        scale: f(ms0.e.abs() + ms0.p1.abs() + ms0.p2.abs()),
    })
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

use super::{depth_bracket, Regime, SeparatedTrajectory};

/// Least-squares fit `q ≈ constant · (t₀ − t)^{−exponent}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit<T> {
    pub constant: T,
    pub exponent: T,
}

/// Asymptotics of a blowup trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlowupReport<T> {
    pub t0: T,
    /// Fit of `sup h` over the probe particles.
    pub rate_h: PowerFit<T>,
    pub rate_u2: PowerFit<T>,
    pub rate_v2: PowerFit<T>,
    /// `(t₀ − t, ϑ(t)(t₀ − t))` for every sample with `|ϑ| ≥ 1`; empty on the tangent branch.
    pub theta_rate: Vec<(T, T)>,
    pub window_samples: usize,
    /// Minimum over samples of `h / ((x₀²/2) e^{g(0)+g(t)})` along the path from `x₀ = 1`.
    pub min_depth_bound_ratio: T,
}

/// Least-squares fit of `values ≈ C·gaps^{−p}` in log–log coordinates.
pub fn power_fit<T: Real>(gaps: &[T], values: &[T]) -> PowerFit<T> {
    let n = from_usize::<T>(gaps.len());
    let xs: Vec<T> = gaps.iter().map(|g| -g.ln()).collect();
    let ys: Vec<T> = values.iter().map(|v| v.ln()).collect();
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let exponent = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    PowerFit { constant: (my - exponent * mx).exp(), exponent }
}

/// Fits the blowup rates of `sup h`, `sup U²` and `sup V²` along the particle paths starting at
/// the labels in `probes`, over the window where the growth variable (`|ϑ|`, or `|ξ|` on the
/// tangent branch) lies in `[10², 10⁵]`.
///
/// Eulerian suprema over all radii are unbounded at every time because the fields grow in `r`;
/// following particles gives the finite, `1/(t₀ − t)`-type quantities.
pub fn blowup_rates<T: Real>(traj: &SeparatedTrajectory<T>, probes: &[T]) -> Result<BlowupReport<T>> {
    let t0 = traj
        .regime
        .t_blowup()
        .ok_or_else(|| Error::InvalidArgument(format!("{} regime does not blow up", traj.regime.name())))?;
    if probes.is_empty() || probes.iter().any(|&x| !(x > T::zero())) {
        return Err(Error::InvalidArgument("probe labels must be non-empty and positive".into()));
    }
    let tangent = matches!(traj.regime, Regime::ExplicitTan { .. });
    let (lo, hi) = (lit::<T>(1e2), lit::<T>(1e5));
    let half = lit::<T>(0.5);
    let g0 = traj.g_at(0);

    let mut gaps = Vec::new();
    let mut sup_h = Vec::new();
    let mut sup_u2 = Vec::new();
    let mut sup_v2 = Vec::new();
    let mut theta_rate = Vec::new();
    let mut min_ratio = T::infinity();

    for i in 0..traj.len() {
        let s = traj.state(i);
        let gap = t0 - s.t;
        if !(gap > T::zero()) {
            continue;
        }
        let th = traj.theta_at(i);
        if !tangent && th.abs() >= T::one() {
            theta_rate.push((gap, th * gap));
        }
        let bracket = depth_bracket(&s);
        let shrink = ((g0 - s.g) * half).exp();
        let h_unit = half * shrink * shrink * bracket;
        let bound = half * (g0 + s.g).exp();
        min_ratio = min_ratio.min(h_unit / bound);

        let growth = if tangent { s.xi.abs() } else { th.abs() };
        if growth < lo || growth > hi {
            continue;
        }
        let mut mh = T::zero();
        let mut mu = T::zero();
        let mut mv = T::zero();
        for &x in probes {
            let pos = shrink * x;
            let h = half * pos * pos * bracket;
            let u = -half * pos * s.xi;
            let v = pos * (s.g.exp() - half);
            mh = mh.max(h);
            mu = mu.max(u * u);
            mv = mv.max(v * v);
        }
        gaps.push(gap);
        sup_h.push(mh);
        sup_u2.push(mu);
        sup_v2.push(mv);
    }
    if gaps.len() < 2 {
        return Err(Error::EmptyFitWindow(format!(
            "{} samples with growth variable in [1e2, 1e5]",
            gaps.len()
        )));
    }
    Ok(BlowupReport {
        t0,
        rate_h: power_fit(&gaps, &sup_h),
        rate_u2: power_fit(&gaps, &sup_u2),
        rate_v2: power_fit(&gaps, &sup_v2),
        theta_rate,
        window_samples: gaps.len(),
        min_depth_bound_ratio: min_ratio,
    })
}

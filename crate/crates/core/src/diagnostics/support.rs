use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::RadialState;
use crate::scalar::{to_f64, Real};

/// Largest `|(h − h̄, U, V)|` component over the grid.
pub fn perturbation_amplitude<T: Real>(s: &RadialState<T>) -> T {
    (0..s.len()).fold(T::zero(), |m, i| m.max(perturbation_at(s, i)))
}

fn perturbation_at<T: Real>(s: &RadialState<T>, i: usize) -> T {
    (s.h[i] - s.h_bar).abs().max(s.u[i].abs()).max(s.v[i].abs())
}

/// Outer radius of the thresholded perturbation support: the largest cell center where any
/// component of `(h − h̄, U, V)` exceeds `threshold`, or 0 when none does.
pub fn support_radius<T: Real>(s: &RadialState<T>, threshold: T) -> T {
    (0..s.len()).rev().find(|&i| perturbation_at(s, i) > threshold).map_or(T::zero(), |i| s.r_centers[i])
}

/// Support radius over a run, its growth rate and the check against the cone `R + √h̄·t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportSeries {
    pub threshold: f64,
    pub sigma: f64,
    pub spacing: f64,
    pub times: Vec<f64>,
    pub radius: Vec<f64>,
    /// Least-squares slope of `radius` against time.
    pub slope: f64,
    /// `max(radius(t) − (R + σt + 2·spacing))`, with `R` the initial radius.
    pub cone_excess: f64,
    pub within_cone: bool,
}

/// Tracks the thresholded support radius over stored snapshots (first snapshot at `t = 0`).
pub fn support_tracker<T: Real>(snapshots: &[RadialState<T>], threshold: T) -> Result<SupportSeries> {
    if !(threshold > T::zero()) {
        return Err(Error::InvalidArgument(format!("support threshold must be positive, got {threshold}")));
    }
    let first = snapshots.first().ok_or_else(|| Error::InvalidArgument("no snapshots to track".into()))?;
    let sigma = to_f64(first.h_bar).sqrt();
    let spacing = to_f64(first.dr());
    let times: Vec<f64> = snapshots.iter().map(|s| to_f64(s.t)).collect();
    let radius: Vec<f64> = snapshots.iter().map(|s| to_f64(support_radius(s, threshold))).collect();
    let (r0, t0) = (radius[0], times[0]);
    let cone_excess = times
        .iter()
        .zip(&radius)
        .map(|(&t, &r)| r - (r0 + sigma * (t - t0) + 2.0 * spacing))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(SupportSeries {
        threshold: to_f64(threshold),
        sigma,
        spacing,
        slope: linear_slope(&times, &radius),
        within_cone: cone_excess <= 0.0,
        cone_excess,
        times,
        radius,
    })
}

fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return 0.0;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// Fit of `slope(dr) = limit + C·dr^order` through measurements on three grids refined by a
/// common ratio.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeExtrapolation {
    pub limit: f64,
    pub order: f64,
    /// `C·dr^order` on the finest grid.
    pub grid_term: f64,
}

/// Richardson extrapolation of slopes measured at spacings `dr[0] > dr[1] > dr[2]` with
/// `dr[0]/dr[1] = dr[1]/dr[2]`.
pub fn extrapolate_slope(dr: [f64; 3], slope: [f64; 3]) -> Result<SlopeExtrapolation> {
    let ratio = dr[0] / dr[1];
    if !(ratio > 1.0) || ((dr[1] / dr[2]) - ratio).abs() > 1e-9 * ratio {
        return Err(Error::InvalidArgument(format!("spacings {dr:?} are not a geometric refinement")));
    }
    let (d1, d2) = (slope[0] - slope[1], slope[1] - slope[2]);
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() || d1.abs() <= d2.abs() {
        return Err(Error::PostCondition(format!("slopes {slope:?} do not converge monotonically")));
    }
    let order = (d1 / d2).ln() / ratio.ln();
    let grid_term = d2 / (ratio.powf(order) - 1.0);
    Ok(SlopeExtrapolation { limit: slope[2] - grid_term, order, grid_term })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RadialGrid;

    #[test]
    fn rest_state_has_no_support() {
        let g = RadialGrid::new(0.0, 2.0, 40).unwrap();
        let snaps = vec![RadialState::rest(&g, 1.0); 3];
        let s = support_tracker(&snaps, 1e-8).unwrap();
        assert!(s.radius.iter().all(|&r| r == 0.0));
        assert!(s.within_cone);
    }

    #[test]
    fn radius_is_outermost_exceeding_cell() {
        let g = RadialGrid::new(0.0, 2.0, 20).unwrap();
        let mut s = RadialState::rest(&g, 1.0);
        s.v[7] = 1e-3;
        s.h[3] = 1.1;
        assert_eq!(support_radius(&s, 1e-6), s.r_centers[7]);
        assert_eq!(support_radius(&s, 1e-2), s.r_centers[3]);
        assert!((perturbation_amplitude(&s) - 0.1f64).abs() < 1e-12);
    }

    #[test]
    fn extrapolation_recovers_model() {
        let f = |dr: f64| 1.0 + 3.0 * dr.powf(0.8);
        let dr = [0.04, 0.02, 0.01];
        let e = extrapolate_slope(dr, dr.map(f)).unwrap();
        assert!((e.limit - 1.0).abs() < 1e-10 && (e.order - 0.8).abs() < 1e-10);
        assert!((e.grid_term - 3.0 * 0.01f64.powf(0.8)).abs() < 1e-10);
        assert!(extrapolate_slope(dr, [1.0, 1.0, 1.0]).is_err());
    }
}

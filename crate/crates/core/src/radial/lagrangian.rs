use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

use super::run::PathHistory;

/// Largest deviations along one tracked path.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PathDrift<T> {
    pub label: T,
    /// `max |X̃Ṽ + X̃²/2 − (X₀V₀ + X₀²/2)|`.
    pub angular_momentum: T,
    /// `max |h̃X̃∂X̃/∂X₀ − h₀X₀|`.
    pub mass: T,
    /// `max |Ṽ − (V₀X₀ + X₀²/2 − X̃²/2)/X̃|`.
    pub reconstruction: T,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LagrangianReport<T> {
    pub paths: Vec<PathDrift<T>>,
    pub max_angular_momentum: T,
    pub max_mass: T,
    pub max_reconstruction: T,
}

/// Drift of the particle invariants along the paths tracked during a run: angular momentum
/// `X̃Ṽ + X̃²/2`, mass `h̃X̃∂X̃/∂X₀` (neighbor-path differencing) and the rotation formula
/// `Ṽ = (V₀X₀ + X₀²/2 − X̃²/2)/X̃`.
pub fn lagrangian_probe<T: Real>(history: &PathHistory<T>) -> Result<LagrangianReport<T>> {
    if history.times.is_empty() {
        return Err(Error::InvalidArgument("no path samples recorded".into()));
    }
    let half = lit::<T>(0.5);
    let mut paths = Vec::with_capacity(history.labels.len());
    for (k, &label) in history.labels.iter().enumerate() {
        let x0 = history.center(0, k);
        let v0 = history.v[0][k];
        let a0 = x0 * v0 + half * x0 * x0;
        let m0 = history.h[0][k] * x0 * history.stretch(0, k);
        let mut drift = PathDrift { label, angular_momentum: T::zero(), mass: T::zero(), reconstruction: T::zero() };
        for out in 0..history.times.len() {
            let x = history.center(out, k);
            let spread = &history.positions[out][3 * k..3 * k + 3];
            if spread.iter().any(|p| !(*p > T::zero()) || !p.is_finite()) {
                return Err(Error::PathExitedDomain { label: to_f64(label), position: to_f64(x) });
            }
            let v = history.v[out][k];
            let a = x * v + half * x * x;
            let m = history.h[out][k] * x * history.stretch(out, k);
            let v_formula = (a0 - half * x * x) / x;
            drift.angular_momentum = drift.angular_momentum.max((a - a0).abs());
            drift.mass = drift.mass.max((m - m0).abs());
            drift.reconstruction = drift.reconstruction.max((v - v_formula).abs());
        }
        paths.push(drift);
    }
    let max = |f: fn(&PathDrift<T>) -> T| paths.iter().map(f).fold(T::zero(), T::max);
    Ok(LagrangianReport {
        max_angular_momentum: max(|p| p.angular_momentum),
        max_mass: max(|p| p.mass),
        max_reconstruction: max(|p| p.reconstruction),
        paths,
    })
}

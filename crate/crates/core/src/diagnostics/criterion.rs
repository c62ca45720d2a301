use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MomentSet;
use crate::scalar::{lit, Real};

/// Evaluation of the moment blowup criterion
/// `m(0) > 0` and `P₁(0)² + (E(0) + P₂(0))² ≥ π(R + 2π√h̄)⁴ E(0) ‖h₀‖∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome<T> {
    pub holds: bool,
    pub mass_positive: bool,
    pub lhs: T,
    pub rhs: T,
    /// `lhs − rhs`.
    pub margin: T,
}

pub fn theorem1_criterion<T: Real>(ms0: &MomentSet<T>, support_radius: T, h_bar: T, h0_sup: T) -> CriterionOutcome<T> {
    let lhs = ms0.p1 * ms0.p1 + (ms0.e + ms0.p2) * (ms0.e + ms0.p2);
    let reach = support_radius + lit::<T>(2.0) * T::PI() * h_bar.sqrt();
    let rhs = T::PI() * reach.powi(4) * ms0.e * h0_sup;
    let mass_positive = ms0.m > T::zero();
    CriterionOutcome { holds: mass_positive && lhs >= rhs, mass_positive, lhs, rhs, margin: lhs - rhs }
}

/// Bracket `[lo, hi]` of the smallest `λ` at which `holds(λ)` switches from false to true.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdBracket<T> {
    pub lo: T,
    pub hi: T,
    pub evaluations: usize,
}

impl<T: Real> ThresholdBracket<T> {
    pub fn midpoint(&self) -> T {
        (self.lo + self.hi) * lit(0.5)
    }
}

/// Bisects for the switch point of `holds` on `[lo, hi]`, where `holds(lo)` must be false and
/// `holds(hi)` true; stops when the bracket is narrower than `tol` (relative to `hi`).
pub fn bisect_threshold<T: Real, F>(mut holds: F, lo: T, hi: T, tol: T) -> Result<ThresholdBracket<T>>
where
    F: FnMut(T) -> Result<bool>,
{
    if !(lo < hi) || !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("bad bisection bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let (mut a, mut b) = (lo, hi);
    if holds(a)? || !holds(b)? {
        return Err(Error::InvalidArgument(format!("[{lo}, {hi}] does not bracket a switch")));
    }
    let mut evaluations = 2;
    while b - a > tol * b.abs().max(T::one()) {
        let mid = (a + b) * lit(0.5);
        evaluations += 1;
        if holds(mid)? {
            b = mid;
        } else {
            a = mid;
        }
        if evaluations > 500 {
            break;
        }
    }
    Ok(ThresholdBracket { lo: a, hi: b, evaluations })
}

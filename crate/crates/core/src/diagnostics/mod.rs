//! Functionals evaluated on solver states: moments and their closed-form evolution, the moment
//! blowup criterion and its scaling families, support tracking, and the weighted-momentum
//! report for inward-moving data.

mod criterion;
mod forecast;
mod moments;
mod scaling;
mod support;
mod theorem2;

pub use criterion::{bisect_threshold, theorem1_criterion, CriterionOutcome, ThresholdBracket};
pub use forecast::{moment_forecast, moment_residuals, MomentResiduals};
pub use moments::{moments_planar, moments_radial};
pub use scaling::{scale_family, ScaleFamily, ScaleKind};
pub use support::{
    extrapolate_slope, perturbation_amplitude, support_radius, support_tracker, SlopeExtrapolation, SupportSeries,
};
pub use theorem2::{
    cutoff_mu, cutoff_mu_prime, theorem2_report, weight, weight_growth_constant, Theorem2Report, CUTOFF_DESCRIPTION,
};

//! Numerical laboratory for singularity formation in the rotating shallow water equations.
//!
//! - [`separated`]: the separated-variable reduction, its invariants, regimes, blowup times and
//!   rates.
//! - [`radial`] and [`planar`]: finite-volume solvers for the radially symmetric and the full
//!   planar system, with blowup detection.
//! - [`diagnostics`]: moments, the moment blowup criterion, scaling families, support tracking
//!   and the weighted-momentum report.
//! - [`model`]: shared state types, scenario configuration and run records.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the `*64` aliases below fix
//! the common double-precision case.

pub mod diagnostics;
pub mod error;
pub mod flux;
pub mod io;
pub mod model;
pub mod numerics;
pub mod planar;
pub mod radial;
pub mod scalar;
pub mod separated;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SeparatedState64 = separated::SeparatedState<f64>;
pub type SeparatedTrajectory64 = separated::SeparatedTrajectory<f64>;
pub type Regime64 = separated::Regime<f64>;
pub type RadialState64 = model::RadialState<f64>;
pub type RadialGrid64 = model::RadialGrid<f64>;
pub type PlanarState64 = model::PlanarState<f64>;
pub type MomentSet64 = model::MomentSet<f64>;
pub type RadialScheme64 = radial::RadialScheme<f64>;

pub type RadialState32 = model::RadialState<f32>;
pub type PlanarState32 = model::PlanarState<f32>;

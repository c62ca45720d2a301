//! Shared numerical kernels: adaptive explicit ODE integration, strong-stability-preserving
//! time stepping, and adaptive quadrature with endpoint-singularity handling.

mod ode;
mod quad;
mod ssp;

pub use ode::{integrate_adaptive, OdeOptions, OdeSolution, OdeTermination};
pub use quad::{quad_adaptive, quad_singular, quad_to_infinity, QuadratureResult, SingularEnds};
pub use ssp::ssp_step;

//! Finite-volume solver for the radially symmetric system in `(h, hU, hV)` with geometric and
//! rotational source terms.

mod lagrangian;
mod run;
mod scheme;

pub use crate::flux::characteristic_speeds;
pub use lagrangian::{lagrangian_probe, LagrangianReport, PathDrift};
pub use run::{evolve_radial, initial_gradient, run_radial, PathHistory, RadialEvolution, RadialRun, RunPlan};
pub use scheme::{step, Detection, RadialBoundary, RadialScheme, SeparatedTrace, StepOutcome, TraceSource};

//! Cartesian finite-volume solver for the full two-dimensional rotating system in
//! `(h, hu, hv)`, used to check the moment identities on non-radial data.

mod run;
mod scheme;

pub use run::{evolve_planar, initial_gradient_planar, run_planar, PlanarEvolution, PlanarRun};
pub use scheme::{rotate_quarter, step2d, PlanarBoundary, PlanarOutcome};

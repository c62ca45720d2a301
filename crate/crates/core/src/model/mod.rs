//! Domain types shared by every solver: states, grids, scenario configuration and run records.

mod config;
mod profiles;
mod record;
mod state;

pub use config::{
    perturbation_support, validate_config, DiagnosticOptions, FluxKind, GridSpec, InitialData, OutputOptions,
    ScenarioConfig, ScenarioKind, SolverOptions,
};
pub use profiles::{build_initial_planar, build_initial_radial, bump};
pub use record::{BlowupSummary, DetectionReason, RunRecord, SchemeMeta, StepDiagnostics, Termination};
pub use state::{MomentSet, PlanarState, RadialGrid, RadialState};

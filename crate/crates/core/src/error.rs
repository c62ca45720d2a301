use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Configuration rejected; every violated constraint is listed.
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("quadrature did not converge within {subdivisions} subdivisions (error estimate {error:e})")]
    QuadratureDiverged { subdivisions: usize, error: f64 },

    #[error("blowup time mismatch: quadrature {quadrature} vs escape {escape}")]
    BlowupTimeMismatch { quadrature: f64, escape: f64 },

    #[error("unphysical reconstruction: depth bracket {bracket:e} is negative")]
    UnphysicalReconstruction { bracket: f64 },

    #[error("time {t} outside trajectory span [{start}, {end}]")]
    OutsideSpan { t: f64, start: f64, end: f64 },

    #[error("fit window empty: {0}")]
    EmptyFitWindow(String),

    #[error("particle path left the domain: label {label}, position {position}")]
    PathExitedDomain { label: f64, position: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("post-condition failed: {0}")]
    PostCondition(String),

    #[error("malformed file: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::units::Dimension;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot convert {from:?} into {to:?}")]
    DimensionMismatch { from: Dimension, to: Dimension },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("R = {r} bohr outside working range [{min}, {max}]")]
    OutOfRange { r: f64, min: f64, max: f64 },

    #[error("singular characteristic time: {0}")]
    Singularity(&'static str),

    #[error("crossing calibration failed: {reason} (tried C3 in [{lo}, {hi}] a.u.)")]
    Calibration { reason: String, lo: f64, hi: f64 },

    #[error("crossing: {0}")]
    Crossing(String),

    #[error("grid needs at least {required} points, got {given}")]
    Capacity { required: usize, given: usize },

    #[error("vector length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("states live on different grids")]
    GridMismatch,

    #[error("eigenvalue drift {drift:.3e} between N and 2N points exceeds {tolerance:.1e}")]
    Resolution { drift: f64, tolerance: f64 },

    #[error("level v = {0} not available")]
    MissingLevel(usize),

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("Chebyshev recurrence left the spectral range (|phi| = {growth:.3e}); re-estimate the spectral bounds")]
    SpectralRange { growth: f64 },

    #[error("propagation failed at t = {t_ps} ps: {source}")]
    Step {
        t_ps: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config { path: path.into(), msg: msg.into() }
    }

    /// Process exit code for the command-line front end, one per error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::Io(_) | Error::Json(_) => 3,
            Error::DimensionMismatch { .. }
            | Error::Domain(_)
            | Error::OutOfRange { .. }
            | Error::LengthMismatch { .. }
            | Error::GridMismatch => 4,
            Error::Calibration { .. } | Error::Crossing(_) => 5,
            Error::Capacity { .. } | Error::Resolution { .. } => 6,
            Error::Singularity(_) | Error::MissingLevel(_) | Error::Eigen(_) => 7,
            Error::SpectralRange { .. } | Error::Step { .. } => 8,
        }
    }

    /// Module the error originated in, used to prefix CLI diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "units",
            Error::OutOfRange { .. } | Error::Calibration { .. } | Error::Crossing(_) => "potentials",
            Error::Capacity { .. } | Error::LengthMismatch { .. } | Error::GridMismatch => "grid",
            Error::Resolution { .. } | Error::MissingLevel(_) | Error::Eigen(_) => "spectrum",
            Error::SpectralRange { .. } | Error::Step { .. } => "propagator",
            Error::Singularity(_) | Error::Domain(_) => "physics",
            Error::Config { .. } => "config",
            Error::Io(_) | Error::Json(_) => "io",
        }
    }
}

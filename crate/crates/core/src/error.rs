use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulation library and the command-line driver.
#[derive(Debug, Error)]
pub enum FloeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("infeasible packing: total disc area {disc_area} exceeds domain area {domain_area}")]
    InfeasiblePacking { disc_area: f64, domain_area: f64 },

    #[error("numerical blow-up at step {step}: {what}")]
    NumericalBlowup { step: u64, what: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
}

impl FloeError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        FloeError::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FloeError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: config=2, numerics=3, io=4.
    pub fn exit_code(&self) -> i32 {
        match self {
            FloeError::InvalidArgument(_) | FloeError::InfeasiblePacking { .. } | FloeError::Config(_) => 2,
            FloeError::Parse { .. } => 2,
            FloeError::NumericalBlowup { .. } => 3,
            FloeError::Io { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, FloeError>;

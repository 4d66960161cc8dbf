use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("not enough samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("unstable autoregressive coefficients: {0}")]
    Unstable(String),

    #[error("singular Toeplitz system at order {order}")]
    Singular { order: usize },

    #[error("spectral density below floor {floor:e} at grid index {index}")]
    SpectralSingularity { index: usize, floor: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameter(_) | Error::Unsupported(_) => 2,
            Error::Degenerate(_) | Error::Singular { .. } | Error::SpectralSingularity { .. } => 4,
            _ => 1,
        }
    }
}

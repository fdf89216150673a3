use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite integrand value {value} at node r = {node}")]
    NonFinite { node: f64, value: f64 },

    #[error("eigen-iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        /// residual norm after each iteration
        trace: Vec<f64>,
    },

    #[error("unknown suite `{name}`; available: {}", available.join(", "))]
    UnknownSuite { name: String, available: Vec<String> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status: 1 when a numerical check could not be completed,
    /// 2 for unusable input or configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonFinite { .. } | Error::NonConvergence { .. } => 1,
            _ => 2,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

use thiserror::Error;

/// Errors raised while building graphs, kernels and Leja sequences.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no vertices")]
    Empty,

    #[error("conflicting weights for edge ({u}, {v}): {first} vs {second}")]
    ConflictingEdge {
        u: usize,
        v: usize,
        first: f64,
        second: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("matrix is numerically nonsingular (best null residual {residual:e})")]
    Nonsingular { residual: f64 },

    #[error("degenerate kernel: {0}")]
    Degenerate(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("right-hand side is outside the numerical range (residual {residual:e})")]
    OutsideRange { residual: f64 },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Nonsingular { .. }
            | Error::Degenerate(_)
            | Error::NoConvergence { .. }
            | Error::OutsideRange { .. } => true,
            Error::Trial { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

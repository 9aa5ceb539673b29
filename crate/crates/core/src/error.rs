//! Crate-wide error type with stable machine-readable codes.

use thiserror::Error;

/// Errors reported by library operations.
///
/// Each variant carries a stable code (see [`Error::code`]) that the CLI and
/// the C API translate into exit statuses and numeric error codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: dimension mismatch, invalid index, bad parameter.
    #[error("input error: {0}")]
    Input(String),

    /// An operation that needs a nonzero subspace received the zero subspace.
    #[error("empty subspace: {0}")]
    EmptySubspace(String),

    /// Witness search is undefined: the common intersection fills the space.
    #[error("empty report: {0}")]
    Empty(String),

    /// A norm underflowed where a positive norm is required.
    #[error("zero norm: {0}")]
    ZeroNorm(String),

    /// A documented precondition does not hold for the given arguments.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// A constructive search did not reach its target.
    #[error("construction failed: {0}")]
    ConstructionFailed(String),

    /// Chained transport lost more than twice the per-block budget.
    #[error(
        "chain degraded: total loss {total:.6e} exceeds bound {bound:.6e}; per-block losses {per_block:?}"
    )]
    ChainDegraded {
        total: f64,
        bound: f64,
        per_block: Vec<f64>,
    },

    /// Replay found outputs that differ from the recorded run.
    #[error("replay mismatch: {0}")]
    Mismatch(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable code for reports and the C API.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Input(_) => "INPUT_ERROR",
            Error::EmptySubspace(_) => "EMPTY_SUBSPACE",
            Error::Empty(_) => "EMPTY",
            Error::ZeroNorm(_) => "ZERO_NORM",
            Error::PreconditionViolated(_) => "PRECONDITION_VIOLATED",
            Error::ConstructionFailed(_) => "CONSTRUCTION_FAILED",
            Error::ChainDegraded { .. } => "CHAIN_DEGRADED",
            Error::Mismatch(_) => "MISMATCH",
            Error::Io(_) => "IO_ERROR",
            Error::Json(_) => "JSON_ERROR",
        }
    }

    /// Process exit code contract: 1 bad input, 2 failed construction,
    /// 3 replay mismatch.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConstructionFailed(_) | Error::ChainDegraded { .. } => 2,
            Error::Mismatch(_) => 3,
            _ => 1,
        }
    }
}

pub(crate) fn input(msg: impl Into<String>) -> Error {
    Error::Input(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::PreconditionViolated(msg.into())
}

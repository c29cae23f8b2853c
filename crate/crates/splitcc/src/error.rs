use thiserror::Error;

#[derive(Debug, Error)]
pub enum SplitccError {
    /// Malformed input files (FCIDUMP, overlap JSON, run specs).
    #[error("parse error: {0}")]
    Parse(String),

    /// Arguments that violate an operation's preconditions.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Reference coefficient too small for intermediate normalization.
    #[error(
        "reference coefficient |c0| = {c0:.3e} below threshold {threshold:.3e}; \
             coupled cluster requires a reference-dominated state"
    )]
    ReferenceDominance { c0: f64, threshold: f64 },

    /// Iterative solver hit its iteration cap or diverged.
    #[error("solver did not converge: {0}")]
    NonConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SplitccError>;

impl SplitccError {
    /// CLI exit code: 2 input error, 3 non-convergence, 4 precondition violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            SplitccError::Parse(_) | SplitccError::Io(_) | SplitccError::Json(_) => 2,
            SplitccError::NonConvergence(_) => 3,
            SplitccError::InvalidInput(_) | SplitccError::ReferenceDominance { .. } => 4,
        }
    }
}

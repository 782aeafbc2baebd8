use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("particle number must satisfy 1 <= N <= {max}, got {got}")]
    InvalidParticleNumber { got: u32, max: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state has zero norm{}", .context.as_deref().map(|c| format!(" ({c})")).unwrap_or_default())]
    ZeroNorm { context: Option<String> },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("eigensolver failed to converge for eigenvalue index {index}")]
    NonConvergence { index: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("probe is (numerically) an eigenvector of the generator: variance {variance:e}")]
    DegenerateProbe { variance: f64 },

    #[error("no real solution: {0}")]
    NoRealSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn zero_norm(context: impl Into<String>) -> Self {
        Error::ZeroNorm { context: Some(context.into()) }
    }
}

use thiserror::Error;

/// Failures reported by meshing, assembly, factorization and iterative solves.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mesh level {level} exceeds the supported maximum {max}")]
    LevelTooLarge { level: u32, max: u32 },

    #[error("unsupported element: {0}")]
    UnsupportedElement(String),

    #[error("spaces are defined on different meshes")]
    MeshMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("matrix is not symmetric positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("matrix is singular: rank deficiency {deficiency} (first zero pivot at index {index})")]
    Singular { deficiency: usize, index: usize },

    #[error("zero frequency vector")]
    ZeroFrequency,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("dense problem of size {size} exceeds the limit {limit}")]
    DenseLimitExceeded { size: usize, limit: usize },

    #[error("eigenvalue iteration did not converge")]
    EigenNoConvergence,

    #[error("PCG did not converge in {iterations} iterations (relative residual {relative_residual:e})")]
    NotConverged {
        iterations: usize,
        relative_residual: f64,
        history: Vec<f64>,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

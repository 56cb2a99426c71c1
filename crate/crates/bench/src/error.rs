use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl BenchError {
    /// Process exit status: 2 config, 3 solver, 4 verification, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Solver(_) => 3,
            BenchError::Verification(_) => 4,
            BenchError::Io(_) | BenchError::Json(_) => 1,
        }
    }
}

pub type BenchResultT<T> = std::result::Result<T, BenchError>;

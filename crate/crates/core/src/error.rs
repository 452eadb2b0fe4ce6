use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("steady state is not unique: null space has dimension {null_dim}")]
    DegenerateSteadyState { null_dim: usize },

    #[error("singular linear system (condition number {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("time step too large: trace drifted by {drift:.3e}")]
    StepSize { drift: f64 },

    #[error("sweep failed at {} point(s): {}", failures.len(), describe(failures))]
    SweepFailed { failures: Vec<(usize, Box<Error>)> },
}

fn describe(failures: &[(usize, Box<Error>)]) -> String {
    failures
        .iter()
        .map(|(i, e)| format!("[{i}] {e}"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

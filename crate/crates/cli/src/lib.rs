//! Benchmark and solve harness around the `qschur` eigensolver.

pub mod bench;
pub mod solve;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Solver(#[from] qschur::Error),

    #[error("QR iteration did not converge after {sweeps} sweeps; partial results written")]
    NoConvergence { sweeps: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 2 for usage errors, 3 for nonconvergence, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::NoConvergence { .. } => 3,
            _ => 1,
        }
    }
}

use std::path::PathBuf;

use crate::qmat::QMatrix;

/// Errors produced by the eigensolver and its building blocks.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {context} ({left:?} vs {right:?})")]
    DimensionMismatch {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index range out of bounds: {0}")]
    OutOfBounds(String),

    /// `alpha` and `beta` lie in the same similarity class, so the scalar
    /// Sylvester equation has no unique solution.
    #[error("same similarity class: alpha = {alpha}, beta = {beta}")]
    SameSimilarityClass { alpha: String, beta: String },

    #[error("eigenvalue collision at index {index}: shift is similar to T({index},{index})")]
    EigenvalueCollision { index: usize },

    #[error("non-distinct spectrum: eigenvalues {first} and {second} are similar")]
    NonDistinctSpectrum { first: usize, second: usize },

    #[error("QR iteration did not converge after {sweeps} sweeps")]
    NoConvergence {
        sweeps: usize,
        partial: Box<PartialSchur>,
    },

    #[error("reference eigensolver did not converge")]
    OracleNoConvergence,

    #[error("parse error in {path:?} line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("non-finite value in matrix data")]
    NonFinite,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// State of a Schur iteration that ran out of sweeps.
#[derive(Debug, Clone)]
pub struct PartialSchur {
    pub h: QMatrix,
    pub u: QMatrix,
    /// Rows at or below this index hold converged eigenvalues.
    pub active_hi: usize,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

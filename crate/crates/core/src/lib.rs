//! Dense eigensolver for non-Hermitian quaternion matrices.
//!
//! [`schur_decompose`] computes `A = U·T·Uᴴ` with `U` unitary and `T` upper
//! triangular whose diagonal holds the standardized eigenvalues (complex
//! numbers with nonnegative imaginary part). Optional aggressive early
//! deflation shortens the iteration on larger matrices. Eigenvectors follow
//! from `T` by quaternion back substitution.

pub mod aed;
pub mod eigvec;
pub mod error;
pub mod oracle;
pub mod qmat;
pub mod quat;
pub mod reorder;
pub mod schur;
pub mod sylvester;

pub use aed::{aed_step, aed_window_size, AedConfig, AedOutcome, AedStats, SpikeRule, WindowRule};
pub use eigvec::{full_eigenvectors, triangular_eigenvectors, EigenSystem};
pub use error::{Error, PartialSchur, Result};
pub use oracle::{complex_adjoint, metrics, reference_spectrum, ComplexMatrix, Metrics};
pub use qmat::{MatrixClass, QMatrix, Reflector, Rotation2};
pub use quat::Quaternion;
pub use reorder::{reorder_selected, swap_adjacent};
pub use schur::{hessenberg_reduce, schur_decompose, PhaseTimings, SchurDecomposition, SchurOptions, ShiftPoly};
pub use sylvester::{oracle_scalar, same_class, solve_scalar, solve_triu, ScalarSylvesterProblem, TriuSolution};

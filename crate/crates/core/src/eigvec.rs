//! Right eigenvectors from the quaternion Schur form.
//!
//! For `T` upper triangular with distinct standardized eigenvalues, column
//! `k` of `X` is `(y; 1; 0; …; 0)` where `y` solves the triangular
//! Sylvester equation `T₁₁·y − y·λ_k = −T₁₂` on the leading `k × k` block.
//! Then `T·X = X·Λ`, and the eigenvectors of `A = U·T·Uᴴ` are `U·X`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::{vec_norm, Quaternion};
use crate::sylvester::solve_triu_in_place;

const EPS: f64 = f64::EPSILON;

/// Constant in the columnwise residual bound
/// `‖T·x_k − x_k·λ_k‖ ≤ c·n·ε·‖T‖_F·‖x_k‖`.
pub const RESIDUAL_CONSTANT: f64 = 10.0;

#[derive(Clone, Debug)]
pub struct EigenSystem {
    /// Upper triangular; unit diagonal unless a column had to be scaled
    /// down (or normalized on request).
    pub x: QMatrix,
    pub lambdas: Vec<Complex64>,
}

impl EigenSystem {
    pub fn lambda_matrix(&self) -> QMatrix {
        QMatrix::diag_complex(&self.lambdas)
    }

    /// `‖T·x_k − x_k·λ_k‖₂` for every column.
    pub fn column_residuals(&self, t: &QMatrix) -> Result<Vec<f64>> {
        let tx = t.matmul(&self.x)?;
        let n = self.x.ncols();
        Ok((0..n)
            .map(|k| {
                let l = Quaternion::from_complex(self.lambdas[k]);
                let r: Vec<Quaternion> = tx.col(k).iter().zip(self.x.col(k)).map(|(a, x)| *a - *x * l).collect();
                vec_norm(&r)
            })
            .collect())
    }

    /// Check the columnwise bound with [`RESIDUAL_CONSTANT`]. Returns the
    /// worst ratio of residual to bound (≤ 1 means the bound holds).
    pub fn residual_bound_ratio(&self, t: &QMatrix) -> Result<f64> {
        let n = t.nrows() as f64;
        let tn = t.frob_norm();
        let res = self.column_residuals(t)?;
        Ok(res
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let bound = RESIDUAL_CONSTANT * n * EPS * tn * vec_norm(self.x.col(k));
                if bound > 0.0 {
                    r / bound
                } else if *r == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EigvecOptions {
    /// Scale every column to unit 2-norm.
    pub normalize: bool,
}

/// First pair of indices whose diagonal entries share a similarity class.
fn find_collision(lambdas: &[Complex64]) -> Option<(usize, usize)> {
    for k in 1..lambdas.len() {
        for i in 0..k {
            let (a, b) = (lambdas[i], lambdas[k]);
            let tol = EPS * (a.norm() + b.norm() + 1.0);
            if (a - b).norm() <= tol || (a - b.conj()).norm() <= tol {
                return Some((i, k));
            }
        }
    }
    None
}

/// Eigenvectors of an upper triangular `T` with standardized diagonal.
pub fn triangular_eigenvectors(t: &QMatrix) -> Result<EigenSystem> {
    triangular_eigenvectors_with(t, EigvecOptions::default())
}

pub fn triangular_eigenvectors_with(t: &QMatrix, opts: EigvecOptions) -> Result<EigenSystem> {
    let n = t.nrows();
    if !t.is_square() {
        return Err(Error::InvalidArgument("T must be square".into()));
    }
    if !t.is_upper_triangular() {
        return Err(Error::InvalidArgument("T must be upper triangular".into()));
    }
    let diag = t.diagonal();
    if let Some(i) = diag.iter().position(|d| !d.is_complex()) {
        return Err(Error::InvalidArgument(format!("T({i},{i}) is not complex")));
    }
    let lambdas: Vec<Complex64> = diag.iter().map(|d| d.to_complex()).collect();
    if let Some((first, second)) = find_collision(&lambdas) {
        return Err(Error::NonDistinctSpectrum { first, second });
    }

    let mut x = QMatrix::zeros(n, n);
    for k in 0..n {
        let lead = t.submatrix(0, k, 0, k);
        let col = x.col_mut(k);
        for (xi, ti) in col[..k].iter_mut().zip(&t.col(k)[..k]) {
            *xi = -*ti;
        }
        let scale = if k > 0 {
            solve_triu_in_place(&lead, lambdas[k], &mut col[..k])?
        } else {
            1.0
        };
        col[k] = Quaternion::real(scale);
        if opts.normalize {
            let nrm = vec_norm(col);
            for v in col.iter_mut() {
                *v = *v / nrm;
            }
        }
    }
    Ok(EigenSystem { x, lambdas })
}

/// Eigenvectors of `A = U·T·Uᴴ`: `U·X`.
pub fn full_eigenvectors(u: &QMatrix, es: &EigenSystem) -> Result<QMatrix> {
    u.matmul(&es.x)
}

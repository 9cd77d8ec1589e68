//! Dense quaternion matrices.
//!
//! Storage is column-major: entry `(i, j)` lives at `data[i + j * nrows]`.

mod io;
mod random;
mod transform;

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quat::Quaternion;

pub use io::{format_qmatrix, parse_qmatrix, read_qmatrix, write_qmatrix};
pub use random::{
    fullrand, hessrand, random_standardized_triangular, random_unit_quaternion, MatrixClass, TRIANGULAR_SEPARATION,
};
pub use transform::{make_reflector, Reflector, Rotation2};

#[derive(Clone, Debug, PartialEq)]
pub struct QMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Quaternion>,
}

impl QMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![Quaternion::ZERO; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Quaternion::ONE;
        }
        m
    }

    /// Build from column-major data.
    pub fn from_col_major(nrows: usize, ncols: usize, data: Vec<Quaternion>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::InvalidArgument(format!(
                "{} entries given for a {nrows}x{ncols} matrix",
                data.len()
            )));
        }
        Ok(Self { nrows, ncols, data })
    }

    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                data.push(f(i, j));
            }
        }
        Self { nrows, ncols, data }
    }

    /// Build from a slice of rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidArgument("ragged rows".into()));
        }
        Ok(Self::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }

    pub fn diag(entries: &[Quaternion]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &d) in entries.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn diag_complex(entries: &[Complex64]) -> Self {
        let q: Vec<_> = entries.iter().map(|&c| Quaternion::from_complex(c)).collect();
        Self::diag(&q)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Quaternion] {
        &mut self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[Quaternion] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [Quaternion] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    /// Two distinct columns, mutably.
    pub fn col_pair_mut(&mut self, a: usize, b: usize) -> (&mut [Quaternion], &mut [Quaternion]) {
        assert!(a < b, "col_pair_mut requires a < b");
        let n = self.nrows;
        let (lo, hi) = self.data.split_at_mut(b * n);
        (&mut lo[a * n..(a + 1) * n], &mut hi[..n])
    }

    pub fn row(&self, i: usize) -> Vec<Quaternion> {
        (0..self.ncols).map(|j| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Quaternion> {
        (0..self.nrows.min(self.ncols)).map(|i| self[(i, i)]).collect()
    }

    /// Copy of the block with rows `r0..r1` and columns `c0..c1`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> QMatrix {
        assert!(r0 <= r1 && r1 <= self.nrows && c0 <= c1 && c1 <= self.ncols);
        Self::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Overwrite the block starting at `(r0, c0)` with `block`.
    pub fn set_submatrix(&mut self, r0: usize, c0: usize, block: &QMatrix) {
        assert!(r0 + block.nrows <= self.nrows && c0 + block.ncols <= self.ncols);
        for j in 0..block.ncols {
            for i in 0..block.nrows {
                self[(r0 + i, c0 + j)] = block[(i, j)];
            }
        }
    }

    pub fn adjoint(&self) -> QMatrix {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> QMatrix {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.ncols != rhs.nrows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let mut out = QMatrix::zeros(self.nrows, rhs.ncols);
        for j in 0..rhs.ncols {
            let out_col = &mut out.data[j * self.nrows..(j + 1) * self.nrows];
            for (k, &b) in rhs.col(j).iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for (o, &a) in out_col.iter_mut().zip(self.col(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᴴ · rhs` without forming the adjoint.
    pub fn adjoint_matmul(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.nrows != rhs.nrows {
            return Err(Error::DimensionMismatch {
                context: "adjoint_matmul",
                left: (self.ncols, self.nrows),
                right: rhs.shape(),
            });
        }
        Ok(Self::from_fn(self.ncols, rhs.ncols, |i, j| {
            self.col(i)
                .iter()
                .zip(rhs.col(j))
                .map(|(a, b)| a.conj() * *b)
                .sum()
        }))
    }

    pub fn sub(&self, rhs: &QMatrix) -> Result<QMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::DimensionMismatch {
                context: "sub",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| *a - *b).collect();
        Ok(QMatrix { data, ..*self })
    }

    pub fn scale(&self, s: f64) -> QMatrix {
        QMatrix {
            data: self.data.iter().map(|a| *a * s).collect(),
            ..*self
        }
    }

    /// Frobenius norm, scaled to avoid overflow.
    pub fn frob_norm(&self) -> f64 {
        crate::quat::vec_norm(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, q| m.max(q.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    /// Exact zeros strictly below the first subdiagonal.
    pub fn is_upper_hessenberg(&self) -> bool {
        (0..self.ncols).all(|j| ((j + 2)..self.nrows).all(|i| self[(i, j)].is_zero()))
    }

    /// Exact zeros strictly below the diagonal.
    pub fn is_upper_triangular(&self) -> bool {
        (0..self.ncols).all(|j| ((j + 1)..self.nrows).all(|i| self[(i, j)].is_zero()))
    }

    /// `‖selfᴴ·self − I‖_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.adjoint_matmul(self).expect("square by construction");
        g.sub(&QMatrix::identity(self.ncols)).expect("same shape").frob_norm()
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.data[i + j * self.nrows]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[i + j * self.nrows]
    }
}

//! Elementary unitary transforms: Householder-type reflectors and the 2×2
//! rotation used for eigenvalue swapping.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::quat::{vec_norm, Quaternion};

use super::QMatrix;

/// Unitary `P = (I − τ·v·vᴴ) · diag(phase, 1, …, 1)` with `v[0] = 1`.
///
/// The Hermitian factor maps `x` onto a quaternion multiple of `e₁`; the
/// unit `phase` rotates that entry onto the nonnegative real axis so that
/// `Pᴴ·x = β·e₁` with `β = ‖x‖₂ ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Reflector {
    pub v: Vec<Quaternion>,
    pub tau: f64,
    pub phase: Quaternion,
}

impl Reflector {
    pub fn identity(len: usize) -> Self {
        let mut v = vec![Quaternion::ZERO; len];
        if let Some(first) = v.first_mut() {
            *first = Quaternion::ONE;
        }
        Self {
            v,
            tau: 0.0,
            phase: Quaternion::ONE,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.v.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.tau == 0.0 && self.phase == Quaternion::ONE
    }

    /// `A ← Pᴴ·A` on rows `row0..row0+len` restricted to `cols`.
    pub fn apply_left(&self, a: &mut QMatrix, row0: usize, cols: Range<usize>) -> Result<()> {
        let m = self.len();
        if row0 + m > a.nrows() || cols.end > a.ncols() || cols.start > cols.end {
            return Err(Error::OutOfBounds(format!(
                "reflector rows {row0}..{} cols {cols:?} on {:?}",
                row0 + m,
                a.shape()
            )));
        }
        let conj_phase = self.phase.conj();
        let apply_phase = self.phase != Quaternion::ONE;
        for j in cols {
            let col = &mut a.col_mut(j)[row0..row0 + m];
            if self.tau != 0.0 {
                let w: Quaternion = self.v.iter().zip(col.iter()).map(|(v, x)| v.conj() * *x).sum();
                let tw = w * self.tau;
                for (x, v) in col.iter_mut().zip(&self.v) {
                    *x -= *v * tw;
                }
            }
            if apply_phase {
                col[0] = conj_phase * col[0];
            }
        }
        Ok(())
    }

    /// `A ← A·P` on columns `col0..col0+len` restricted to `rows`.
    pub fn apply_right(&self, a: &mut QMatrix, rows: Range<usize>, col0: usize) -> Result<()> {
        let m = self.len();
        if col0 + m > a.ncols() || rows.end > a.nrows() || rows.start > rows.end {
            return Err(Error::OutOfBounds(format!(
                "reflector cols {col0}..{} rows {rows:?} on {:?}",
                col0 + m,
                a.shape()
            )));
        }
        if self.tau != 0.0 {
            let mut s = vec![Quaternion::ZERO; rows.len()];
            for (k, v) in self.v.iter().enumerate() {
                let col = &a.col(col0 + k)[rows.clone()];
                for (si, x) in s.iter_mut().zip(col) {
                    *si += *x * *v;
                }
            }
            for (k, v) in self.v.iter().enumerate() {
                let tv = v.conj() * self.tau;
                let col = &mut a.col_mut(col0 + k)[rows.clone()];
                for (x, si) in col.iter_mut().zip(&s) {
                    *x -= *si * tv;
                }
            }
        }
        if self.phase != Quaternion::ONE {
            for x in &mut a.col_mut(col0)[rows] {
                *x = *x * self.phase;
            }
        }
        Ok(())
    }

    /// Apply to a standalone vector: `x ← Pᴴ·x`.
    pub fn apply_left_vec(&self, x: &mut [Quaternion]) {
        assert_eq!(x.len(), self.len());
        if self.tau != 0.0 {
            let w: Quaternion = self.v.iter().zip(x.iter()).map(|(v, x)| v.conj() * *x).sum();
            let tw = w * self.tau;
            for (xi, v) in x.iter_mut().zip(&self.v) {
                *xi -= *v * tw;
            }
        }
        if let Some(first) = x.first_mut() {
            *first = self.phase.conj() * *first;
        }
    }

    /// Dense `len × len` matrix of `P`.
    pub fn to_matrix(&self) -> QMatrix {
        let mut p = QMatrix::identity(self.len());
        self.apply_right(&mut p, 0..self.len(), 0).expect("square");
        p
    }
}

/// Build a reflector with `Pᴴ·x = β·e₁`, `β = ‖x‖₂`.
///
/// A zero vector yields the identity reflector and `β = 0`.
pub fn make_reflector(x: &[Quaternion]) -> (Reflector, f64) {
    let m = x.len();
    if m == 0 {
        return (Reflector::identity(0), 0.0);
    }
    let x1 = x[0];
    let tail_norm = vec_norm(&x[1..]);
    let a1 = x1.abs();
    let phi = if a1 == 0.0 { Quaternion::ONE } else { x1 * (1.0 / a1) };
    if tail_norm == 0.0 {
        let mut r = Reflector::identity(m);
        r.phase = phi;
        return (r, a1);
    }
    let beta = crate::quat::scaled_norm(&[a1, tail_norm]);
    // v = [1; x̃·conj(φ)/(|x₁| + β)], τ = 1 + |x₁|/β
    let d = 1.0 / (a1 + beta);
    let cphi = phi.conj() * d;
    let mut v = Vec::with_capacity(m);
    v.push(Quaternion::ONE);
    v.extend(x[1..].iter().map(|xi| *xi * cphi));
    let r = Reflector {
        v,
        tau: 1.0 + a1 / beta,
        phase: -phi,
    };
    (r, beta)
}

/// The 2×2 unitary `G = [[c, −s], [s, conj(c)]]` with `|c|² + s² = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation2 {
    pub c: Quaternion,
    pub s: f64,
}

impl Rotation2 {
    pub const IDENTITY: Rotation2 = Rotation2 {
        c: Quaternion::ONE,
        s: 0.0,
    };

    /// `s = (1 + |χ|²)^{-1/2}`, `c = s·χ`.
    pub fn from_chi(chi: Quaternion) -> Self {
        let r = crate::quat::scaled_norm(&[1.0, chi.abs()]);
        let s = 1.0 / r;
        Self { c: chi * s, s }
    }

    pub fn is_identity(&self) -> bool {
        self.s == 0.0 && self.c == Quaternion::ONE
    }

    /// `[rₖ; rₗ] ← Gᴴ·[rₖ; rₗ]` for rows `k`, `l` over `cols`.
    pub fn apply_left(&self, a: &mut QMatrix, k: usize, l: usize, cols: Range<usize>) {
        let cc = self.c.conj();
        for j in cols {
            let (x, y) = (a[(k, j)], a[(l, j)]);
            a[(k, j)] = cc * x + y * self.s;
            a[(l, j)] = self.c * y - x * self.s;
        }
    }

    /// `[cₖ, cₗ] ← [cₖ, cₗ]·G` for columns `k < l` over `rows`.
    pub fn apply_right(&self, a: &mut QMatrix, rows: Range<usize>, k: usize, l: usize) {
        let cc = self.c.conj();
        let (ck, cl) = a.col_pair_mut(k, l);
        for i in rows {
            let (x, y) = (ck[i], cl[i]);
            ck[i] = x * self.c + y * self.s;
            cl[i] = y * cc - x * self.s;
        }
    }

    /// `[xₖ; xₗ] ← Gᴴ·[xₖ; xₗ]` on a vector.
    pub fn apply_left_vec(&self, v: &mut [Quaternion], k: usize, l: usize) {
        let (x, y) = (v[k], v[l]);
        v[k] = self.c.conj() * x + y * self.s;
        v[l] = self.c * y - x * self.s;
    }

    pub fn to_matrix(&self) -> QMatrix {
        QMatrix::from_rows(&[
            vec![self.c, -Quaternion::real(self.s)],
            vec![Quaternion::real(self.s), self.c.conj()],
        ])
        .expect("2x2")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::fullrand;
    use proptest::prelude::*;

    const EPS: f64 = f64::EPSILON;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn apply_to(p: &Reflector, x: &[Quaternion]) -> Vec<Quaternion> {
        let mut y = x.to_vec();
        p.apply_left_vec(&mut y);
        y
    }

    #[test]
    fn e1_gives_identity() {
        let (p, beta) = make_reflector(&[Quaternion::ONE, Quaternion::ZERO]);
        assert!(p.is_identity());
        assert_eq!(beta, 1.0);
    }

    #[test]
    fn zero_vector_gives_identity() {
        let (p, beta) = make_reflector(&[Quaternion::ZERO; 3]);
        assert!(p.is_identity());
        assert_eq!(beta, 0.0);
    }

    #[test]
    fn second_basis_vector() {
        let x = [Quaternion::ZERO, Quaternion::real(3.0)];
        let (p, beta) = make_reflector(&x);
        assert!((beta - 3.0).abs() <= 8.0 * EPS * 3.0);
        let y = apply_to(&p, &x);
        assert!((y[0] - Quaternion::real(3.0)).abs() <= 16.0 * EPS);
        assert!(y[1].abs() <= 16.0 * EPS);
    }

    #[test]
    fn pure_quaternion_entries() {
        let x = [Quaternion::J, Quaternion::K];
        let (p, beta) = make_reflector(&x);
        let s2 = std::f64::consts::SQRT_2;
        assert!((beta - s2).abs() <= 8.0 * EPS * s2);
        let y = apply_to(&p, &x);
        assert!((y[0] - Quaternion::real(s2)).abs() <= 16.0 * EPS);
        assert!(y[0].w > 0.0);
        assert!(y[1].abs() <= 16.0 * EPS);
        assert!(p.to_matrix().orthogonality_defect() <= 16.0 * EPS);
    }

    #[test]
    fn identity_reflector_leaves_matrix() {
        let a = fullrand(4, 9).unwrap();
        let mut b = a.clone();
        let p = Reflector::identity(4);
        p.apply_left(&mut b, 0, 0..4).unwrap();
        p.apply_right(&mut b, 0..4, 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zeroes_a_column() {
        let mut a = fullrand(6, 4).unwrap();
        let x: Vec<_> = a.col(1)[2..].to_vec();
        let (p, beta) = make_reflector(&x);
        p.apply_left(&mut a, 2, 0..6).unwrap();
        assert!((a[(2, 1)] - Quaternion::real(beta)).abs() <= 32.0 * EPS);
        for i in 3..6 {
            assert!(a[(i, 1)].abs() <= 32.0 * EPS);
        }
    }

    #[test]
    fn out_of_range_is_rejected() {
        let mut a = QMatrix::zeros(3, 3);
        let p = Reflector::identity(2);
        assert!(p.apply_left(&mut a, 2, 0..3).is_err());
        assert!(p.apply_right(&mut a, 0..4, 0).is_err());
    }

    #[test]
    fn rotation_from_chi() {
        let g = Rotation2::from_chi(q(5.0, 0.0, 0.0, 0.0));
        assert!((g.c.norm_sqr() + g.s * g.s - 1.0).abs() <= 4.0 * EPS);
        assert!(g.to_matrix().orthogonality_defect() <= 8.0 * EPS);
        let huge = Rotation2::from_chi(q(1e300, 1e300, 0.0, 0.0));
        assert!(huge.c.is_finite() && huge.s.is_finite());
        assert!(huge.to_matrix().orthogonality_defect() <= 8.0 * EPS);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reflector_maps_to_beta_e1(n in 1usize..10, seed in any::<u64>()) {
            let a = fullrand(n, seed).unwrap();
            let x = a.col(0).to_vec();
            let (p, beta) = make_reflector(&x);
            let norm = vec_norm(&x);
            let tol = 8.0 * n as f64 * EPS;
            prop_assert!((beta - norm).abs() <= tol * norm);
            let y = apply_to(&p, &x);
            prop_assert!((y[0] - Quaternion::real(beta)).abs() <= 2.0 * tol * norm);
            prop_assert!(vec_norm(&y[1..]) <= 2.0 * tol * norm);
            prop_assert!(p.to_matrix().orthogonality_defect() <= tol);
        }

        #[test]
        fn similarity_preserves_frobenius(n in 2usize..10, seed in any::<u64>()) {
            let mut a = fullrand(n, seed).unwrap();
            let before = a.frob_norm();
            let x = a.col(0)[1..].to_vec();
            let (p, _) = make_reflector(&x);
            p.apply_left(&mut a, 1, 0..n).unwrap();
            p.apply_right(&mut a, 0..n, 1).unwrap();
            prop_assert!((a.frob_norm() - before).abs() <= 8.0 * n as f64 * EPS * before);
        }

        #[test]
        fn rotation_preserves_frobenius(n in 2usize..10, seed in any::<u64>(), c in prop::array::uniform4(-4.0f64..4.0)) {
            let mut a = fullrand(n, seed).unwrap();
            let before = a.frob_norm();
            let g = Rotation2::from_chi(Quaternion::from_components(c));
            prop_assert!((g.c.norm_sqr() + g.s * g.s - 1.0).abs() <= 4.0 * EPS);
            g.apply_left(&mut a, 0, 1, 0..n);
            g.apply_right(&mut a, 0..n, 0, 1);
            prop_assert!((a.frob_norm() - before).abs() <= 8.0 * n as f64 * EPS * before);
        }
    }
}

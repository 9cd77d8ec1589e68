//! Quaternion Sylvester equations `αχ − χβ = γ` and their upper triangular
//! vector form `T·x − x·λ = b`.
//!
//! With complex `α`, `β` and `χ = χ₁ + χ₂·j`, the relation `j·β = conj(β)·j`
//! decouples the scalar equation into
//! `(α − β)·χ₁ = γ₁` and `(α − conj β)·χ₂ = γ₂`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::{ComplexPair, Quaternion};

const EPS: f64 = f64::EPSILON;

/// Values above this are treated as about to overflow during back substitution.
const BIGNUM: f64 = f64::MAX / 16.0;

/// A scalar Sylvester problem with complex coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarSylvesterProblem {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Quaternion,
}

impl ScalarSylvesterProblem {
    pub fn is_solvable(&self) -> bool {
        !same_class(self.alpha, self.beta)
    }

    pub fn solve(&self) -> Result<Quaternion> {
        solve_scalar(self.alpha, self.beta, self.gamma)
    }
}

/// True when `α` and `β` are numerically in the same similarity class, i.e.
/// `α ≈ β` or `α ≈ conj(β)` relative to `ε·(|α| + |β|)`.
pub fn same_class(alpha: Complex64, beta: Complex64) -> bool {
    let tol = EPS * (alpha.norm() + beta.norm());
    (alpha - beta).norm() <= tol || (alpha - beta.conj()).norm() <= tol
}

fn degenerate(alpha: impl std::fmt::Display, beta: impl std::fmt::Display) -> Error {
    Error::SameSimilarityClass {
        alpha: alpha.to_string(),
        beta: beta.to_string(),
    }
}

/// Solve `αχ − χβ = γ` for complex `α`, `β`.
pub fn solve_scalar(alpha: Complex64, beta: Complex64, gamma: Quaternion) -> Result<Quaternion> {
    if same_class(alpha, beta) {
        return Err(degenerate(alpha, beta));
    }
    let g = gamma.split();
    Ok(Quaternion::join(ComplexPair {
        c1: g.c1 / (alpha - beta),
        c2: g.c2 / (alpha - beta.conj()),
    }))
}

/// Real 4×4 matrix of `χ ↦ αχ − χβ` in the basis `(1, i, j, k)`.
fn sylvester_operator(alpha: Quaternion, beta: Quaternion) -> [[f64; 4]; 4] {
    let basis = [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K];
    let mut m = [[0.0; 4]; 4];
    for (col, e) in basis.iter().enumerate() {
        let img = (alpha * *e - *e * beta).components();
        for (row, v) in img.iter().enumerate() {
            m[row][col] = *v;
        }
    }
    m
}

/// Independent check for [`solve_scalar`]: solve `αχ − χβ = γ` for
/// arbitrary quaternions by Gaussian elimination with partial pivoting on
/// the 4×4 real representation of the operator.
pub fn oracle_scalar(alpha: Quaternion, beta: Quaternion, gamma: Quaternion) -> Result<Quaternion> {
    let mut m = sylvester_operator(alpha, beta);
    let mut rhs = gamma.components();
    let tol = 16.0 * EPS * (alpha.abs() + beta.abs());
    for k in 0..4 {
        let p = (k..4)
            .max_by(|&a, &b| m[a][k].abs().total_cmp(&m[b][k].abs()))
            .expect("nonempty");
        if m[p][k].abs() <= tol {
            return Err(degenerate(alpha, beta));
        }
        m.swap(k, p);
        rhs.swap(k, p);
        for r in (k + 1)..4 {
            let f = m[r][k] / m[k][k];
            if f == 0.0 {
                continue;
            }
            let pivot = m[k];
            for (x, p) in m[r][k..].iter_mut().zip(&pivot[k..]) {
                *x -= f * p;
            }
            rhs[r] -= f * rhs[k];
        }
    }
    let mut x = [0.0; 4];
    for k in (0..4).rev() {
        let s: f64 = ((k + 1)..4).map(|c| m[k][c] * x[c]).sum();
        x[k] = (rhs[k] - s) / m[k][k];
    }
    Ok(Quaternion::from_components(x))
}

/// Solution of `T·x − x·λ = scale·b`.
///
/// `scale` is 1 unless the overflow guard had to shrink the right-hand
/// side, in which case `0 < scale < 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriuSolution {
    pub x: Vec<Quaternion>,
    pub scale: f64,
}

/// Back substitution for `T·x − x·λ = b` with `T` upper triangular with
/// complex diagonal. The right-hand side is overwritten by the solution.
pub fn solve_triu_in_place(t: &QMatrix, lambda: Complex64, b: &mut [Quaternion]) -> Result<f64> {
    let n = t.nrows();
    if !t.is_square() {
        return Err(Error::InvalidArgument("T must be square".into()));
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "solve_triu right-hand side",
            left: t.shape(),
            right: (b.len(), 1),
        });
    }
    let mut scale = 1.0;
    let rescale = |b: &mut [Quaternion], f: f64, scale: &mut f64| {
        for v in b.iter_mut() {
            *v *= f;
        }
        *scale *= f;
    };
    for i in (0..n).rev() {
        let d = t[(i, i)];
        if !d.is_complex() {
            return Err(Error::InvalidArgument(format!("T({i},{i}) is not complex")));
        }
        let alpha = d.to_complex();
        if same_class(alpha, lambda) {
            return Err(Error::EigenvalueCollision { index: i });
        }
        let sep = (alpha - lambda).norm().min((alpha - lambda.conj()).norm());
        let bi = b[i].abs();
        if sep < 1.0 && bi > sep * BIGNUM {
            rescale(b, 0.5 * sep * BIGNUM / bi, &mut scale);
        }
        let chi = solve_scalar(alpha, lambda, b[i]).map_err(|_| Error::EigenvalueCollision { index: i })?;
        b[i] = chi;

        let chi_abs = chi.abs();
        if i > 0 && chi_abs > 1.0 {
            let col = &t.col(i)[..i];
            let cmax = col.iter().fold(0.0_f64, |m, q| m.max(q.abs()));
            let bmax = b[..i].iter().fold(0.0_f64, |m, q| m.max(q.abs()));
            if cmax > (BIGNUM - bmax) / chi_abs {
                let growth = (cmax / BIGNUM) * chi_abs + bmax / BIGNUM;
                rescale(b, 0.5 / growth, &mut scale);
            }
        }
        let chi = b[i];
        let (head, _) = b.split_at_mut(i);
        for (br, tr) in head.iter_mut().zip(t.col(i)) {
            *br -= *tr * chi;
        }
    }
    Ok(scale)
}

/// Back substitution for `T·x − x·λ = b`; see [`solve_triu_in_place`].
pub fn solve_triu(t: &QMatrix, lambda: Complex64, b: &[Quaternion]) -> Result<TriuSolution> {
    let mut x = b.to_vec();
    let scale = solve_triu_in_place(t, lambda, &mut x)?;
    Ok(TriuSolution { x, scale })
}

/// `‖T·x − x·λ − scale·b‖₂`, for tests and diagnostics.
pub fn triu_residual(t: &QMatrix, lambda: Complex64, sol: &TriuSolution, b: &[Quaternion]) -> f64 {
    let n = t.nrows();
    let l = Quaternion::from_complex(lambda);
    let r: Vec<Quaternion> = (0..n)
        .map(|i| {
            let tx: Quaternion = (i..n).map(|k| t[(i, k)] * sol.x[k]).sum();
            tx - sol.x[i] * l - b[i] * sol.scale
        })
        .collect();
    crate::quat::vec_norm(&r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::random_unit_quaternion;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    fn residual(alpha: Quaternion, beta: Quaternion, gamma: Quaternion, chi: Quaternion) -> f64 {
        (alpha * chi - chi * beta - gamma).abs()
    }

    #[test]
    fn real_case() {
        assert_eq!(solve_scalar(c(2.0, 0.0), c(0.0, 0.0), Quaternion::ONE).unwrap(), q(0.5, 0.0, 0.0, 0.0));
        let o = oracle_scalar(Quaternion::real(2.0), Quaternion::ZERO, Quaternion::ONE).unwrap();
        assert!((o - q(0.5, 0.0, 0.0, 0.0)).abs() <= 4.0 * EPS);
    }

    #[test]
    fn conjugate_pair_is_degenerate() {
        let e = solve_scalar(c(0.0, 1.0), c(0.0, -1.0), Quaternion::ONE);
        assert!(matches!(e, Err(Error::SameSimilarityClass { .. })));
        let e = oracle_scalar(Quaternion::I, -Quaternion::I, Quaternion::ONE);
        assert!(matches!(e, Err(Error::SameSimilarityClass { .. })));
        assert!(solve_scalar(c(1.5, 0.5), c(1.5, 0.5), Quaternion::J).is_err());
        assert!(solve_scalar(c(0.0, 0.0), c(0.0, 0.0), Quaternion::J).is_err());
    }

    #[test]
    fn pure_j_right_hand_side() {
        // χ₂ = γ₂ / (α − conj β) = 1 / (−2 + i) = (−2 − i)/5
        let chi = solve_scalar(c(1.0, 2.0), c(3.0, -1.0), Quaternion::J).unwrap();
        let expect = q(0.0, 0.0, -0.4, -0.2);
        assert!((chi - expect).abs() <= 4.0 * EPS);
        let o = oracle_scalar(q(1.0, 2.0, 0.0, 0.0), q(3.0, -1.0, 0.0, 0.0), Quaternion::J).unwrap();
        assert!((o - expect).abs() <= 8.0 * EPS);
    }

    #[test]
    fn oracle_handles_quaternion_coefficients() {
        let two_i = q(0.0, 2.0, 0.0, 0.0);
        let chi = oracle_scalar(Quaternion::J, two_i, Quaternion::K).unwrap();
        assert!(residual(Quaternion::J, two_i, Quaternion::K, chi) <= 1e-14);
        // j and i lie in the same class
        assert!(oracle_scalar(Quaternion::J, Quaternion::I, Quaternion::K).is_err());
    }

    #[test]
    fn oracle_rejects_similar_quaternions() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a = q(0.3, 1.0, -2.0, 0.5);
        let mu = random_unit_quaternion(&mut rng);
        assert!(oracle_scalar(a, mu.conj() * a * mu, Quaternion::ONE).is_err());
    }

    #[test]
    fn scalar_matches_oracle_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..2000 {
            let a = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let b = c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let g = random_unit_quaternion(&mut rng) * rng.random_range(0.1..2.0);
            if (a - b).norm() < 1e-3 || (a - b.conj()).norm() < 1e-3 {
                continue;
            }
            let x = solve_scalar(a, b, g).unwrap();
            let y = oracle_scalar(a.into(), b.into(), g).unwrap();
            assert!((x - y).abs() <= 1e-13 * x.abs().max(y.abs()));
        }
    }

    fn upper(rows: &[Vec<Quaternion>]) -> QMatrix {
        QMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn one_by_one() {
        let t = upper(&[vec![Quaternion::real(2.0)]]);
        let s = solve_triu(&t, c(0.0, 0.0), &[Quaternion::ONE]).unwrap();
        assert_eq!(s.x, vec![q(0.5, 0.0, 0.0, 0.0)]);
        assert_eq!(s.scale, 1.0);
    }

    #[test]
    fn two_by_two_back_substitution() {
        let gamma = q(0.5, -1.0, 2.0, 0.25);
        let t = upper(&[
            vec![Quaternion::ONE, gamma],
            vec![Quaternion::ZERO, Quaternion::real(2.0)],
        ]);
        let b = [Quaternion::ZERO, Quaternion::ONE];
        let s = solve_triu(&t, c(3.0, 0.0), &b).unwrap();
        // x₂ = 1/(2 − 3) = −1, then (1 − 3)·x₁ = −γ·x₂ = γ
        assert_eq!(s.x[1], -Quaternion::ONE);
        assert!((s.x[0] - gamma * (-0.5)).abs() <= 4.0 * EPS);
        assert!(triu_residual(&t, c(3.0, 0.0), &s, &b) <= 8.0 * EPS * (t.frob_norm() + 3.0));
    }

    #[test]
    fn diagonal_t_decouples_exactly() {
        let diag = [c(1.0, 0.5), c(-2.0, 0.0), c(0.3, 3.0)];
        let t = QMatrix::diag_complex(&diag);
        let b = [q(1.0, 2.0, 3.0, 4.0), q(-1.0, 0.0, 0.5, 0.0), Quaternion::K];
        let lambda = c(0.7, 1.1);
        let s = solve_triu(&t, lambda, &b).unwrap();
        for i in 0..3 {
            assert_eq!(s.x[i], solve_scalar(diag[i], lambda, b[i]).unwrap());
        }
    }

    #[test]
    fn collision_reports_index() {
        let t = QMatrix::diag_complex(&[c(1.0, 1.0), c(2.0, 0.5), c(3.0, 0.0)]);
        let e = solve_triu(&t, c(2.0, -0.5), &[Quaternion::ONE; 3]);
        assert!(matches!(e, Err(Error::EigenvalueCollision { index: 1 })));
    }

    #[test]
    fn rejects_bad_shapes() {
        let t = QMatrix::identity(3);
        assert!(solve_triu(&t, c(2.0, 0.0), &[Quaternion::ONE; 2]).is_err());
        let t = QMatrix::diag(&[Quaternion::J]);
        assert!(solve_triu(&t, c(2.0, 0.0), &[Quaternion::ONE]).is_err());
    }

    #[test]
    fn overflow_guard_scales() {
        let t = upper(&[
            vec![Quaternion::ONE, Quaternion::real(1e300)],
            vec![Quaternion::ZERO, Quaternion::real(2.0)],
        ]);
        let lambda = c(2.0 + 1e-12, 0.0);
        let b = [Quaternion::ONE, Quaternion::ONE];
        let s = solve_triu(&t, lambda, &b).unwrap();
        assert!(s.scale < 1.0 && s.scale > 0.0);
        assert!(s.x.iter().all(|v| v.is_finite()));
        let xn = crate::quat::vec_norm(&s.x);
        assert!(triu_residual(&t, lambda, &s, &b) <= 8.0 * EPS * (t.frob_norm() + lambda.norm()) * xn);
    }

    #[test]
    fn problem_type() {
        let p = ScalarSylvesterProblem { alpha: c(2.0, 0.0), beta: c(0.0, 0.0), gamma: Quaternion::ONE };
        assert!(p.is_solvable());
        assert_eq!(p.solve().unwrap(), q(0.5, 0.0, 0.0, 0.0));
        let p = ScalarSylvesterProblem { alpha: c(0.0, 1.0), beta: c(0.0, -1.0), gamma: Quaternion::ONE };
        assert!(!p.is_solvable());
    }
}

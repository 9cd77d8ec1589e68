//! Reordering eigenvalues of a standardized quaternion Schur form.
//!
//! Two adjacent diagonal entries `t₁₁`, `t₂₂` are exchanged by the unitary
//! `G = [[c, −s], [s, conj c]]` built from the solution `χ` of
//! `t₁₁·χ − χ·t₂₂ = −t₁₂`, with `s = (1 + |χ|²)^{-1/2}` and `c = s·χ`.
//! The first column of `G` spans the eigenvector `[χ; 1]` for `t₂₂`, so
//! `Gᴴ·T·G = [[t₂₂, t₂₂·conj χ − conj χ·t₁₁], [0, t₁₁]]`.
//! The diagonal entries are copied, not recomputed, so they stay
//! standardized and bit-identical.

use crate::error::{Error, Result};
use crate::qmat::{QMatrix, Rotation2};
use crate::quat::Quaternion;
use crate::sylvester::{same_class, solve_scalar};

/// Swap `T(k,k)` and `T(k+1,k+1)`, applying the rotation to the rest of
/// `T` and to the columns of `Q`. Returns the rotation used (the identity
/// when the two eigenvalues coincide).
pub fn swap_adjacent(t: &mut QMatrix, q: &mut QMatrix, k: usize) -> Result<Rotation2> {
    let n = t.nrows();
    if !t.is_square() || k + 1 >= n {
        return Err(Error::OutOfBounds(format!("swap position {k} in a {n}x{n} Schur form")));
    }
    if q.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "swap_adjacent Q",
            left: t.shape(),
            right: q.shape(),
        });
    }
    let t11 = t[(k, k)];
    let t22 = t[(k + 1, k + 1)];
    if !t11.is_complex() || !t22.is_complex() {
        return Err(Error::InvalidArgument(format!(
            "diagonal entries {k} and {} must be standardized",
            k + 1
        )));
    }
    let (a, b) = (t11.to_complex(), t22.to_complex());
    if same_class(a, b) {
        return Ok(Rotation2::IDENTITY);
    }
    let chi = solve_scalar(a, b, -t[(k, k + 1)])?;
    let g = Rotation2::from_chi(chi);

    g.apply_left(t, k, k + 1, (k + 2)..n);
    g.apply_right(t, 0..k, k, k + 1);
    g.apply_right(q, 0..q.nrows(), k, k + 1);

    let chi_c = chi.conj();
    t[(k, k)] = t22;
    t[(k + 1, k + 1)] = t11;
    t[(k, k + 1)] = t22 * chi_c - chi_c * t11;
    t[(k + 1, k)] = Quaternion::ZERO;
    Ok(g)
}

/// Move the selected eigenvalues to the leading positions, keeping the
/// relative order inside both groups. Returns the achieved permutation:
/// entry `i` is the original position of the eigenvalue now at `i`.
pub fn reorder_selected(t: &mut QMatrix, q: &mut QMatrix, select: &[bool]) -> Result<Vec<usize>> {
    let n = t.nrows();
    if select.len() != n {
        return Err(Error::InvalidArgument(format!(
            "selection mask has {} entries for a {n}x{n} matrix",
            select.len()
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut dest = 0;
    for i in 0..n {
        if !select[perm[i]] {
            continue;
        }
        for k in (dest..i).rev() {
            swap_adjacent(t, q, k)?;
            perm.swap(k, k + 1);
        }
        dest += 1;
    }
    Ok(perm)
}

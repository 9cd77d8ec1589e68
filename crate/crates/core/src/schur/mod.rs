//! Quaternion Schur decomposition `A = U·T·Uᴴ` by the implicit double-shift
//! QR algorithm.
//!
//! The iteration works on an upper Hessenberg matrix. Each sweep uses a
//! real quadratic shift polynomial `p(z) = z² + p₁z + p₀`; real
//! coefficients commute with quaternion entries, so `p(H)` is well defined
//! and its first column has only three nonzeros. That column seeds a
//! bulge which is chased down the active window with 3×1 reflectors.
//! Converged diagonal entries are finally rotated into the closed upper
//! half of the complex plane by diagonal unitary similarities.

mod small_eig;

use std::time::{Duration, Instant};

use num_complex::Complex64;

use crate::aed::{aed_step_timed, aed_window_size, AedConfig, AedStats, WindowRule};
use crate::error::{Error, PartialSchur, Result};
use crate::qmat::{make_reflector, QMatrix};
use crate::quat::Quaternion;

const EPS: f64 = f64::EPSILON;

/// Active windows smaller than this are iterated with plain QR sweeps.
pub const AED_MIN_ACTIVE: usize = 12;

/// Sweeps without deflation after which an exceptional shift is used.
const EXCEPTIONAL_PERIOD: usize = 10;

/// Real shift polynomial `p(z) = z² + p1·z + p0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftPoly {
    pub p1: f64,
    pub p0: f64,
}

impl ShiftPoly {
    /// `(z − λ)(z − conj λ) = z² − 2·Re(λ)·z + |λ|²`.
    pub fn from_eigenvalue(lambda: Complex64) -> Self {
        Self {
            p1: -2.0 * lambda.re,
            p0: lambda.norm_sqr(),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SchurOptions {
    pub use_aed: bool,
    pub aed: AedConfig,
    /// Total sweep budget; `None` means `30·n`.
    pub max_sweeps: Option<usize>,
}

impl SchurOptions {
    pub fn with_aed() -> Self {
        Self {
            use_aed: true,
            ..Self::default()
        }
    }
}

/// Wall-clock split of a decomposition.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseTimings {
    pub total: Duration,
    /// Time spent accumulating transforms into `U`.
    pub construct_q: Duration,
    /// Time inside AED, excluding its own `U` updates.
    pub aed: Duration,
}

#[derive(Clone, Debug)]
pub struct SchurDecomposition {
    pub u: QMatrix,
    pub t: QMatrix,
    /// Number of QR sweeps applied to the full matrix (AED window solves
    /// are counted separately in `aed_stats`).
    pub sweeps: usize,
    pub aed_stats: Option<AedStats>,
    pub timings: PhaseTimings,
}

impl SchurDecomposition {
    /// Standardized eigenvalues, read off the diagonal of `T`.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diagonal().into_iter().map(Quaternion::to_complex).collect()
    }
}

/// Accumulates the time spent updating `U`.
#[derive(Debug, Default)]
pub(crate) struct QTimer {
    pub elapsed: Duration,
}

impl QTimer {
    pub fn time<R>(&mut self, f: impl FnOnce() -> R) -> R {
        let start = Instant::now();
        let r = f();
        self.elapsed += start.elapsed();
        r
    }
}

/// Reduce a square matrix to upper Hessenberg form, `H = Uᴴ·A·U`.
pub fn hessenberg_reduce(a: &QMatrix) -> Result<(QMatrix, QMatrix)> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("Hessenberg reduction needs a square matrix".into()));
    }
    let mut h = a.clone();
    let mut u = QMatrix::identity(a.nrows());
    hessenberg_in_place(&mut h, &mut u, &mut QTimer::default());
    Ok((h, u))
}

pub(crate) fn hessenberg_in_place(h: &mut QMatrix, u: &mut QMatrix, timer: &mut QTimer) {
    let n = h.nrows();
    for k in 0..n.saturating_sub(2) {
        let x = h.col(k)[k + 1..].to_vec();
        if x[1..].iter().all(|q| q.is_zero()) {
            continue;
        }
        let (p, beta) = make_reflector(&x);
        p.apply_left(h, k + 1, k + 1..n).expect("in range");
        p.apply_right(h, 0..n, k + 1).expect("in range");
        timer.time(|| p.apply_right(u, 0..u.nrows(), k + 1).expect("in range"));
        let col = h.col_mut(k);
        col[k + 1] = Quaternion::real(beta);
        col[k + 2..].fill(Quaternion::ZERO);
    }
}

/// Complex adjoint `[[B₁, B₂], [−conj B₂, conj B₁]]` of a quaternion matrix,
/// column-major.
fn complex_adjoint_data(b: &QMatrix) -> Vec<Complex64> {
    let n = b.nrows();
    let m = 2 * n;
    let mut out = vec![Complex64::new(0.0, 0.0); m * m];
    for j in 0..n {
        for i in 0..n {
            let p = b[(i, j)].split();
            out[i + j * m] = p.c1;
            out[i + (j + n) * m] = p.c2;
            out[(i + n) + j * m] = -p.c2.conj();
            out[(i + n) + (j + n) * m] = p.c1.conj();
        }
    }
    out
}

/// Standardized eigenvalue of a 2×2 quaternion block, choosing the one
/// closest to the standardization of `B(2,2)`.
pub fn eig2x2(b: &QMatrix) -> Complex64 {
    assert_eq!(b.shape(), (2, 2), "eig2x2 needs a 2x2 block");
    let corner = b[(1, 1)].standardize().0;
    small_eig::eigvals(4, complex_adjoint_data(b))
        .into_iter()
        .map(|z| Complex64::new(z.re, z.im.abs()))
        .min_by(|a, b| (a - corner).norm().total_cmp(&(b - corner).norm()))
        .expect("four eigenvalues")
}

/// Shift polynomial from the trailing 2×2 block of the window `[lo, hi]`.
pub fn make_shift(h: &QMatrix, lo: usize, hi: usize) -> ShiftPoly {
    assert!(hi > lo, "shift window needs at least two rows");
    ShiftPoly::from_eigenvalue(eig2x2(&h.submatrix(hi - 1, hi + 1, hi - 1, hi + 1)))
}

/// One implicit double-shift QR sweep on the active window `[lo, hi]`
/// (inclusive). Updates the full rows/columns of `H` so that the result is
/// a Schur form of the whole matrix, and accumulates into `U`.
pub fn qr_sweep(h: &mut QMatrix, u: &mut QMatrix, lo: usize, hi: usize, p: ShiftPoly) -> Result<()> {
    qr_sweep_timed(h, u, lo, hi, p, &mut QTimer::default())
}

pub(crate) fn qr_sweep_timed(
    h: &mut QMatrix,
    u: &mut QMatrix,
    lo: usize,
    hi: usize,
    p: ShiftPoly,
    timer: &mut QTimer,
) -> Result<()> {
    let n = h.nrows();
    if hi >= n || hi < lo + 1 {
        return Err(Error::InvalidArgument(format!(
            "QR sweep window [{lo}, {hi}] needs at least two rows inside {n}"
        )));
    }
    let h11 = h[(lo, lo)];
    let h21 = h[(lo + 1, lo)];
    let h12 = h[(lo, lo + 1)];
    let h22 = h[(lo + 1, lo + 1)];
    let mut first = [
        h11 * h11 + h12 * h21 + h11 * p.p1 + Quaternion::real(p.p0),
        h21 * h11 + h22 * h21 + h21 * p.p1,
        Quaternion::ZERO,
    ];
    if hi >= lo + 2 {
        first[2] = h[(lo + 2, lo + 1)] * h21;
    }
    let nu = u.nrows();
    for k in lo..hi {
        let nr = 3.min(hi - k + 1);
        let x: Vec<Quaternion> = if k == lo {
            first[..nr].to_vec()
        } else {
            h.col(k - 1)[k..k + nr].to_vec()
        };
        let (refl, beta) = make_reflector(&x);
        if k > lo {
            let col = h.col_mut(k - 1);
            col[k] = Quaternion::real(beta);
            col[k + 1..k + nr].fill(Quaternion::ZERO);
        }
        if refl.is_identity() {
            continue;
        }
        refl.apply_left(h, k, k..n)?;
        refl.apply_right(h, 0..(k + 4).min(hi + 1), k)?;
        timer.time(|| refl.apply_right(u, 0..nu, k))?;
    }
    Ok(())
}

/// Zero every negligible subdiagonal entry `H(i, i−1)` for `lo < i ≤ hi`
/// and return their row indices in increasing order.
///
/// An entry is negligible when
/// `|H(i,i−1)| ≤ max(ε·(|H(i−1,i−1)| + |H(i,i)|), underflow threshold)`.
pub fn deflation_scan(h: &mut QMatrix, lo: usize, hi: usize) -> Vec<usize> {
    let mut splits = Vec::new();
    for i in (lo + 1)..=hi {
        if is_negligible(h, i) {
            h[(i, i - 1)] = Quaternion::ZERO;
            splits.push(i);
        }
    }
    splits
}

#[inline]
fn is_negligible(h: &QMatrix, i: usize) -> bool {
    let sub = h[(i, i - 1)];
    if sub.is_zero() {
        return true;
    }
    let tol = (EPS * (h[(i - 1, i - 1)].abs() + h[(i, i)].abs())).max(f64::MIN_POSITIVE);
    sub.abs() <= tol
}

/// Bottom-most split of the window: the largest `l` in `lo..=hi` with
/// `H(l, l−1)` negligible (zeroed), or `lo` when the window is unreduced.
fn find_split(h: &mut QMatrix, lo: usize, hi: usize) -> usize {
    for i in ((lo + 1)..=hi).rev() {
        if is_negligible(h, i) {
            h[(i, i - 1)] = Quaternion::ZERO;
            return i;
        }
    }
    lo
}

/// Map every diagonal entry of the upper triangular `T` into `C₊` with a
/// diagonal unitary similarity, updating `U` to match.
pub fn standardize_diagonal(t: &mut QMatrix, u: &mut QMatrix) {
    standardize_diagonal_timed(t, u, &mut QTimer::default());
}

pub(crate) fn standardize_diagonal_timed(t: &mut QMatrix, u: &mut QMatrix, timer: &mut QTimer) {
    let n = t.nrows();
    for k in 0..n {
        let (lc, omega) = t[(k, k)].standardize();
        if omega != Quaternion::ONE {
            let oc = omega.conj();
            for j in (k + 1)..n {
                t[(k, j)] = oc * t[(k, j)];
            }
            for v in &mut t.col_mut(k)[..k] {
                *v = *v * omega;
            }
            timer.time(|| {
                for v in u.col_mut(k) {
                    *v = *v * omega;
                }
            });
        }
        t[(k, k)] = Quaternion::from_complex(lc);
    }
}

/// Quaternion Schur decomposition of a square matrix.
pub fn schur_decompose(a: &QMatrix, opts: &SchurOptions) -> Result<SchurDecomposition> {
    let start = Instant::now();
    if !a.is_square() {
        return Err(Error::InvalidArgument("Schur decomposition needs a square matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    let mut timer = QTimer::default();
    let mut aed_time = Duration::ZERO;
    let mut h = a.clone();
    let mut u = QMatrix::identity(n);
    hessenberg_in_place(&mut h, &mut u, &mut timer);

    let max_sweeps = opts.max_sweeps.unwrap_or(30 * n);
    let mut sweeps = 0;
    let mut stats = opts.use_aed.then(AedStats::default);
    let mut hi = n.saturating_sub(1);
    let mut its = 0;

    while hi > 0 {
        let mut lo = find_split(&mut h, 0, hi);
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }

        if let Some(stats) = stats.as_mut() {
            let active = hi - lo + 1;
            let window = aed_window_size(n, &opts.aed).filter(|_| active >= AED_MIN_ACTIVE);
            if let Some(w) = window {
                // keep a spike: the window stays strictly inside the active block
                let cfg = AedConfig {
                    window: WindowRule::Fixed(w.min(active - 1)),
                    ..opts.aed
                };
                let t0 = Instant::now();
                let q_before = timer.elapsed;
                let out = aed_step_timed(&mut h, &mut u, lo, hi, &cfg, &mut timer)?;
                aed_time += t0.elapsed() - (timer.elapsed - q_before);
                stats.record(&out);
                if out.n_deflated > 0 {
                    its = 0;
                    if out.n_deflated == active {
                        if lo == 0 {
                            break;
                        }
                        hi = lo - 1;
                        continue;
                    }
                    hi -= out.n_deflated;
                }
                if out.skips_sweep(opts.aed.nibble) {
                    stats.skipped_sweeps += 1;
                    continue;
                }
                lo = find_split(&mut h, lo, hi);
                if lo == hi {
                    continue;
                }
            }
        }

        if sweeps >= max_sweeps {
            return Err(Error::NoConvergence {
                sweeps,
                partial: Box::new(PartialSchur { h, u, active_hi: hi }),
            });
        }
        its += 1;
        let shift = if its % (2 * EXCEPTIONAL_PERIOD) == 0 {
            // ad hoc real perturbation of the corner entry
            let corner = h[(hi, hi)].standardize().0;
            ShiftPoly::from_eigenvalue(corner + 0.75 * h[(hi, hi - 1)].abs())
        } else if its % EXCEPTIONAL_PERIOD == 0 {
            make_shift(&h, lo, lo + 1)
        } else {
            make_shift(&h, lo, hi)
        };
        qr_sweep_timed(&mut h, &mut u, lo, hi, shift, &mut timer)?;
        sweeps += 1;
    }

    standardize_diagonal_timed(&mut h, &mut u, &mut timer);
    Ok(SchurDecomposition {
        u,
        t: h,
        sweeps,
        aed_stats: stats,
        timings: PhaseTimings {
            total: start.elapsed(),
            construct_q: timer.elapsed,
            aed: aed_time,
        },
    })
}

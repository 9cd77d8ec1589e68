//! Independent checks for the quaternion solver.
//!
//! * The complex adjoint embedding `A = A₁ + A₂·j ↦ [[A₁, A₂], [−conj A₂, conj A₁]]`.
//! * A small, deliberately plain complex eigensolver (Householder
//!   Hessenberg reduction, explicit Wilkinson-shifted QR) with a residual
//!   check on every eigenvalue.
//! * Pairing of the conjugation-closed embedded spectrum into standardized
//!   representatives, and bottleneck matching of eigenvalue multisets.
//! * The error metrics `e₁`, `e₂`, `e₃`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::QMatrix;
use crate::quat::Quaternion;

const EPS: f64 = f64::EPSILON;

/// Largest matrix accepted by [`reference_spectrum`].
pub const MAX_REFERENCE_DIM: usize = 64;

/// Eigenvalues with `|Im λ|` at or below this are reported as near-real.
pub const NEAR_REAL_TOL: f64 = 1e-8;

fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Dense column-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![czero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn frob_norm(&self) -> f64 {
        let comps: Vec<f64> = self.data.iter().flat_map(|z| [z.re, z.im]).collect();
        crate::quat::scaled_norm(&comps)
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                context: "complex matmul",
                left: (self.nrows, self.ncols),
                right: (other.nrows, other.ncols),
            });
        }
        let mut out = Self::zeros(self.nrows, other.ncols);
        for j in 0..other.ncols {
            for k in 0..self.ncols {
                let b = other[(k, j)];
                if b == czero() {
                    continue;
                }
                for i in 0..self.nrows {
                    out.data[i + j * self.nrows] += self.data[i + k * self.nrows] * b;
                }
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        assert!(i < self.nrows && j < self.ncols, "index ({i},{j}) out of bounds");
        &self.data[i + j * self.nrows]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        assert!(i < self.nrows && j < self.ncols, "index ({i},{j}) out of bounds");
        &mut self.data[i + j * self.nrows]
    }
}

/// `[[A₁, A₂], [−conj A₂, conj A₁]]` for `A = A₁ + A₂·j`.
pub fn complex_adjoint(a: &QMatrix) -> ComplexMatrix {
    let (n, m) = a.shape();
    let mut out = ComplexMatrix::zeros(2 * n, 2 * m);
    for j in 0..m {
        for i in 0..n {
            let p = a[(i, j)].split();
            out[(i, j)] = p.c1;
            out[(i, j + m)] = p.c2;
            out[(i + n, j)] = -p.c2.conj();
            out[(i + n, j + m)] = p.c1.conj();
        }
    }
    out
}

/// Householder reduction to upper Hessenberg form (eigenvalues only).
fn hessenberg(m: &mut ComplexMatrix) {
    let n = m.nrows;
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| m[(i, k)]).collect();
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        let mut v = x.clone();
        v[0] += phase * alpha;
        let vn = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vn == 0.0 {
            continue;
        }
        // H = I − 2 v vᴴ / (vᴴv), applied on both sides
        for j in 0..n {
            let s: Complex64 = v.iter().enumerate().map(|(r, vr)| vr.conj() * m[(k + 1 + r, j)]).sum();
            let f = s * 2.0 / vn;
            for (r, vr) in v.iter().enumerate() {
                m[(k + 1 + r, j)] -= vr * f;
            }
        }
        for i in 0..n {
            let s: Complex64 = v.iter().enumerate().map(|(r, vr)| m[(i, k + 1 + r)] * vr).sum();
            let f = s * 2.0 / vn;
            for (r, vr) in v.iter().enumerate() {
                m[(i, k + 1 + r)] -= f * vr.conj();
            }
        }
        for i in k + 2..n {
            m[(i, k)] = czero();
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    let (l1, l2) = (tr + disc, tr - disc);
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit QR step `H − μI = QR`, `H ← RQ + μI` on rows/columns
/// `lo..=hi`, using Givens rotations.
fn explicit_qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, mu: Complex64) {
    let n = hi + 1;
    for i in lo..n {
        h[(i, i)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let (x, y) = (h[(k, k)], h[(k + 1, k)]);
        let r = x.norm().hypot(y.norm());
        let (c, s) = if r == 0.0 { (Complex64::new(1.0, 0.0), czero()) } else { (x / r, y / r) };
        // [conj c, conj s; −s, c] applied to rows k, k+1
        for j in k..n {
            let (p, q) = (h[(k, j)], h[(k + 1, j)]);
            h[(k, j)] = c.conj() * p + s.conj() * q;
            h[(k + 1, j)] = -s * p + c * q;
        }
        h[(k + 1, k)] = czero();
        rots.push((c, s));
    }
    for (off, (c, s)) in rots.into_iter().enumerate() {
        let k = lo + off;
        for i in lo..=(k + 1).min(hi) {
            let (p, q) = (h[(i, k)], h[(i, k + 1)]);
            h[(i, k)] = p * c + q * s;
            h[(i, k + 1)] = -p * s.conj() + q * c.conj();
        }
    }
    for i in lo..n {
        h[(i, i)] += mu;
    }
}

fn raw_eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = m.nrows;
    let mut h = m.clone();
    hessenberg(&mut h);
    let mut hi = n.saturating_sub(1);
    let mut its = 0;
    let mut total = 0;
    while n > 0 && hi > 0 {
        let mut lo = 0;
        for i in (1..=hi).rev() {
            let tol = (EPS * (h[(i - 1, i - 1)].norm() + h[(i, i)].norm())).max(f64::MIN_POSITIVE);
            if h[(i, i - 1)].norm() <= tol {
                h[(i, i - 1)] = czero();
                lo = i;
                break;
            }
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if total > 100 * n {
            return Err(Error::OracleNoConvergence);
        }
        let mu = if its % 11 == 0 {
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        explicit_qr_step(&mut h, lo, hi, mu);
    }
    Ok((0..n).map(|i| h[(i, i)]).collect())
}

/// Smallest residual `‖M·x − λ·x‖ / ‖x‖` reached by inverse iteration.
fn inverse_iteration_residual(m: &ComplexMatrix, lambda: Complex64) -> f64 {
    let n = m.nrows;
    let scale = m.frob_norm().max(f64::MIN_POSITIVE);
    // shift slightly off λ so the LU factorization stays nonsingular
    let sigma = lambda + Complex64::new(scale * 1e-14, scale * 1e-14);
    let mut lu = m.clone();
    for i in 0..n {
        lu[(i, i)] -= sigma;
    }
    let mut piv: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let p = (k..n).max_by(|&a, &b| lu[(a, k)].norm().total_cmp(&lu[(b, k)].norm())).unwrap();
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            piv.swap(k, p);
        }
        if lu[(k, k)].norm() == 0.0 {
            lu[(k, k)] = Complex64::new(EPS * scale, 0.0);
        }
        for i in k + 1..n {
            let f = lu[(i, k)] / lu[(k, k)];
            lu[(i, k)] = f;
            for j in k + 1..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= f * t;
            }
        }
    }
    let solve = |b: &[Complex64]| -> Vec<Complex64> {
        let mut y: Vec<Complex64> = piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let t = lu[(i, k)] * y[k];
                y[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = lu[(i, k)] * y[k];
                y[i] -= t;
            }
            y[i] /= lu[(i, i)];
        }
        y
    };
    let mut x: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0, (i as f64 * 0.37).sin())).collect();
    let mut best = f64::INFINITY;
    for _ in 0..4 {
        x = solve(&x);
        let nx = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !nx.is_finite() || nx == 0.0 {
            break;
        }
        for z in x.iter_mut() {
            *z /= nx;
        }
        let r = (0..n)
            .map(|i| {
                let mx: Complex64 = (0..n).map(|j| m[(i, j)] * x[j]).sum();
                (mx - lambda * x[i]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt();
        best = best.min(r);
    }
    best
}

/// Eigenvalues of a complex matrix of dimension at most
/// [`MAX_REFERENCE_DIM`], each verified to have an eigenvector residual
/// within `1e−10·‖M‖_F`.
pub fn reference_spectrum(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    if m.nrows != m.ncols {
        return Err(Error::InvalidArgument("reference_spectrum needs a square matrix".into()));
    }
    if m.nrows > MAX_REFERENCE_DIM {
        return Err(Error::InvalidArgument(format!(
            "reference_spectrum limited to dimension {MAX_REFERENCE_DIM}, got {}",
            m.nrows
        )));
    }
    if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let eig = raw_eigenvalues(m)?;
    let tol = 1e-10 * m.frob_norm();
    for l in &eig {
        if inverse_iteration_residual(m, *l) > tol {
            return Err(Error::OracleNoConvergence);
        }
    }
    Ok(eig)
}

/// Standardized representatives of a conjugation-closed spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct CplusSpectrum {
    /// One value per conjugate pair, with nonnegative imaginary part.
    pub values: Vec<Complex64>,
    /// Largest `|μ − conj λ|` over the chosen pairs.
    pub pairing_defect: f64,
    /// Number of representatives with `|Im| ≤ NEAR_REAL_TOL`.
    pub near_real: usize,
}

/// Pair each eigenvalue with its nearest unpaired conjugate partner and
/// keep one standardized value per pair.
pub fn cplus_representatives(spectrum: &[Complex64]) -> Result<CplusSpectrum> {
    if !spectrum.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument("a conjugation-closed spectrum has even size".into()));
    }
    let mut order: Vec<usize> = (0..spectrum.len()).collect();
    // pair the most clearly non-real values first
    order.sort_by(|&a, &b| spectrum[b].im.abs().total_cmp(&spectrum[a].im.abs()));
    let mut used = vec![false; spectrum.len()];
    let mut values = Vec::with_capacity(spectrum.len() / 2);
    let mut defect: f64 = 0.0;
    for &i in &order {
        if used[i] {
            continue;
        }
        used[i] = true;
        let target = spectrum[i].conj();
        let j = (0..spectrum.len())
            .filter(|&j| !used[j])
            .min_by(|&a, &b| (spectrum[a] - target).norm().total_cmp(&(spectrum[b] - target).norm()))
            .expect("even size leaves a partner");
        used[j] = true;
        defect = defect.max((spectrum[j] - target).norm());
        let avg = (spectrum[i] + spectrum[j].conj()) * 0.5;
        values.push(Complex64::new(avg.re, avg.im.abs()));
    }
    let near_real = values.iter().filter(|z| z.im <= NEAR_REAL_TOL).count();
    Ok(CplusSpectrum {
        values,
        pairing_defect: defect,
        near_real,
    })
}

/// Standardized spectrum of a quaternion matrix through its embedding.
pub fn reference_quaternion_spectrum(a: &QMatrix) -> Result<CplusSpectrum> {
    cplus_representatives(&reference_spectrum(&complex_adjoint(a))?)
}

/// Matching of two eigenvalue multisets minimizing the largest distance.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumMatch {
    pub max_distance: f64,
    /// `pairs[i]` is the index in the second multiset matched to entry `i`.
    pub pairs: Vec<usize>,
}

fn augment(i: usize, adj: &[Vec<bool>], seen: &mut [bool], owner: &mut [Option<usize>]) -> bool {
    for j in 0..adj[i].len() {
        if adj[i][j] && !seen[j] {
            seen[j] = true;
            if owner[j].is_none_or(|o| augment(o, adj, seen, owner)) {
                owner[j] = Some(i);
                return true;
            }
        }
    }
    false
}

fn perfect_matching(adj: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let mut seen = vec![false; n];
        if !augment(i, adj, &mut seen, &mut owner) {
            return None;
        }
    }
    let mut pairs = vec![0; n];
    for (j, o) in owner.iter().enumerate() {
        pairs[o.expect("perfect")] = j;
    }
    Some(pairs)
}

/// Bottleneck assignment: the pairing that minimizes the maximum absolute
/// distance, found by bisection over candidate distances with an
/// augmenting-path matching check.
pub fn match_spectra(a: &[Complex64], b: &[Complex64]) -> Result<SpectrumMatch> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "match_spectra",
            left: (a.len(), 1),
            right: (b.len(), 1),
        });
    }
    if a.is_empty() {
        return Ok(SpectrumMatch { max_distance: 0.0, pairs: vec![] });
    }
    let dist: Vec<Vec<f64>> = a.iter().map(|x| b.iter().map(|y| (x - y).norm()).collect()).collect();
    let mut cands: Vec<f64> = dist.iter().flatten().copied().collect();
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let adj_for = |t: f64| -> Vec<Vec<bool>> { dist.iter().map(|row| row.iter().map(|d| *d <= t).collect()).collect() };
    let (mut lo, mut hi) = (0, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching(&adj_for(cands[mid])).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let pairs = perfect_matching(&adj_for(cands[lo])).expect("largest threshold always matches");
    let max_distance = pairs.iter().enumerate().map(|(i, &j)| dist[i][j]).fold(0.0, f64::max);
    Ok(SpectrumMatch { max_distance, pairs })
}

/// `e₁ = ‖UᴴU − I‖_F / √n`.
pub fn e1_orthogonality(u: &QMatrix) -> f64 {
    u.orthogonality_defect() / (u.ncols() as f64).sqrt()
}

/// `e₂ = ‖UᴴAU − T‖_F / ‖A‖_F`.
pub fn e2_schur(a: &QMatrix, u: &QMatrix, t: &QMatrix) -> Result<f64> {
    let r = u.adjoint_matmul(&a.matmul(u)?)?.sub(t)?.frob_norm();
    let an = a.frob_norm();
    Ok(if an == 0.0 { r } else { r / an })
}

/// `e₃ = ‖AX − XΛ‖_F / ((‖A‖_F + ‖Λ‖_F)·‖X‖_F)`.
pub fn e3_eigenpairs(a: &QMatrix, x: &QMatrix, lambdas: &[Complex64]) -> Result<f64> {
    if lambdas.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            context: "e3 eigenvalue count",
            left: x.shape(),
            right: (lambdas.len(), 1),
        });
    }
    let mut r = a.matmul(x)?;
    for (k, l) in lambdas.iter().enumerate() {
        let lq = Quaternion::from_complex(*l);
        let xc = x.col(k).to_vec();
        for (ri, xi) in r.col_mut(k).iter_mut().zip(xc) {
            *ri -= xi * lq;
        }
    }
    let lnorm = crate::quat::scaled_norm(&lambdas.iter().flat_map(|z| [z.re, z.im]).collect::<Vec<_>>());
    let denom = (a.frob_norm() + lnorm) * x.frob_norm();
    let rn = r.frob_norm();
    Ok(if denom == 0.0 { rn } else { rn / denom })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

pub fn metrics(a: &QMatrix, u: &QMatrix, t: &QMatrix, x: &QMatrix, lambdas: &[Complex64]) -> Result<Metrics> {
    Ok(Metrics {
        e1: e1_orthogonality(u),
        e2: e2_schur(a, u, t)?,
        e3: e3_eigenpairs(a, x, lambdas)?,
    })
}

//! Quaternion scalars.
//!
//! A quaternion `w + x·i + y·j + z·k` is stored as four contiguous `f64`
//! components in `(w, x, y, z)` order. Complex numbers embed as
//! `a + b·i ↦ (a, b, 0, 0)`, and every quaternion splits uniquely as
//! `c1 + c2·j` with `c1 = w + x·i`, `c2 = y + z·i`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
#[repr(C)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// The pair `(c1, c2)` with `q = c1 + c2·j`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexPair {
    pub c1: Complex64,
    pub c2: Complex64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub fn from_complex(c: Complex64) -> Self {
        Self::new(c.re, c.im, 0.0, 0.0)
    }

    /// The `1, i` part. Only meaningful as the full value when
    /// [`is_complex`](Self::is_complex) holds.
    #[inline]
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.w, self.x)
    }

    #[inline]
    pub fn is_complex(self) -> bool {
        self.y == 0.0 && self.z == 0.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.w == 0.0 && self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn components(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    #[inline]
    pub fn from_components(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Pure (vector) part `x·i + y·j + z·k`.
    #[inline]
    pub fn pure(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    /// Unscaled `w² + x² + y² + z²`.
    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    /// Euclidean norm, safe against overflow and underflow.
    #[inline]
    pub fn abs(self) -> f64 {
        scaled_norm(&self.components())
    }

    /// Cheap 1-norm, used where only a magnitude estimate is needed.
    #[inline]
    pub fn abs1(self) -> f64 {
        self.w.abs() + self.x.abs() + self.y.abs() + self.z.abs()
    }

    /// Multiplicative inverse `conj(q) / |q|²`.
    pub fn inv(self) -> Self {
        let s = self.abs1();
        if s == 0.0 {
            return Self::new(f64::INFINITY, 0.0, 0.0, 0.0);
        }
        // Scale first so that |q|² neither overflows nor underflows.
        let t = self * (1.0 / s);
        t.conj() * (1.0 / (t.norm_sqr() * s))
    }

    /// Unit quaternion in the direction of `self`, or `None` for zero.
    pub fn unit(self) -> Option<Self> {
        let r = self.abs();
        if r == 0.0 {
            None
        } else {
            Some(self * (1.0 / r))
        }
    }

    pub fn split(self) -> ComplexPair {
        ComplexPair {
            c1: Complex64::new(self.w, self.x),
            c2: Complex64::new(self.y, self.z),
        }
    }

    pub fn join(p: ComplexPair) -> Self {
        Self::new(p.c1.re, p.c1.im, p.c2.re, p.c2.im)
    }

    /// Multiply by a complex number on the left: `c·q`.
    #[inline]
    pub fn cmul_left(c: Complex64, q: Self) -> Self {
        Self::from_complex(c) * q
    }

    /// Standard representative of the similarity class of `self`.
    ///
    /// Returns `(λc, ω)` with `|ω| = 1`, `conj(ω)·self·ω = λc` and
    /// `λc = Re(self) + |Im(self)|·i` in the closed upper half plane.
    pub fn standardize(self) -> (Complex64, Quaternion) {
        let vnorm = scaled_norm(&[self.x, self.y, self.z]);
        let lc = Complex64::new(self.w, vnorm);
        if vnorm == 0.0 {
            return (lc, Self::ONE);
        }
        // ω must rotate i onto the unit direction u = v/|v| under
        // q ↦ ω q conj(ω). For u·i ≥ 0 use ω ∝ 1 − u·i; otherwise
        // ω = (ω₀ ∝ 1 + u·i)·j, which avoids cancellation near u = −i.
        let (ux, uy, uz) = (self.x / vnorm, self.y / vnorm, self.z / vnorm);
        if ux >= 0.0 {
            let omega = Self::new(1.0 + ux, 0.0, -uz, uy);
            (lc, omega.unit().unwrap_or(Self::ONE))
        } else {
            let omega0 = Self::new(1.0 - ux, 0.0, uz, -uy);
            (lc, omega0.unit().unwrap_or(Self::ONE) * Self::J)
        }
    }
}

/// Two-pass scaled Euclidean norm of a slice of reals.
pub fn scaled_norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let inv = 1.0 / scale;
    let ssq: f64 = v.iter().map(|a| (a * inv) * (a * inv)).sum();
    scale * ssq.sqrt()
}

/// Scaled 2-norm of a quaternion vector.
pub fn vec_norm(v: &[Quaternion]) -> f64 {
    let scale = v.iter().fold(0.0_f64, |m, q| {
        m.max(q.w.abs()).max(q.x.abs()).max(q.y.abs()).max(q.z.abs())
    });
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let inv = 1.0 / scale;
    let ssq: f64 = v.iter().map(|q| (*q * inv).norm_sqr()).sum();
    scale * ssq.sqrt()
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}i{:+}j{:+}k", self.w, self.x, self.y, self.z)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

impl From<Complex64> for Quaternion {
    fn from(c: Complex64) -> Self {
        Self::from_complex(c)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, r: Self) -> Self {
        Self::new(self.w + r.w, self.x + r.x, self.y + r.y, self.z + r.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, r: Self) -> Self {
        Self::new(self.w - r.w, self.x - r.x, self.y - r.y, self.z - r.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, r: Self) -> Self {
        Self::new(
            self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        Self::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, r: Self) {
        *self = *self + r;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, r: Self) {
        *self = *self - r;
    }
}

impl MulAssign<f64> for Quaternion {
    #[inline]
    fn mul_assign(&mut self, s: f64) {
        *self = *self * s;
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::ZERO, |a, b| a + b)
    }
}

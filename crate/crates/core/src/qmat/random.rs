//! Random test matrices.
//!
//! Every nonzero entry is `ω·α` with `ω` an isotropic unit quaternion (four
//! independent standard normals, normalized) and `α` uniform on `[0, 1)`.
//!
//! The generator is ChaCha8 seeded through `seed_from_u64(seed)`. Each
//! matrix class reads its own stream (`fullrand` = 0, `hessrand` = 1), so a
//! `(class, seed)` pair fully determines the matrix on every platform.
//! Entries are drawn column by column, top to bottom.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quat::Quaternion;

use super::QMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MatrixClass {
    FullRand,
    HessRand,
}

impl MatrixClass {
    fn stream(self) -> u64 {
        match self {
            MatrixClass::FullRand => 0,
            MatrixClass::HessRand => 1,
        }
    }

    pub fn generate(self, n: usize, seed: u64) -> Result<QMatrix> {
        match self {
            MatrixClass::FullRand => fullrand(n, seed),
            MatrixClass::HessRand => hessrand(n, seed),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MatrixClass::FullRand => "fullrand",
            MatrixClass::HessRand => "hessrand",
        }
    }
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatrixClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fullrand" => Ok(MatrixClass::FullRand),
            "hessrand" => Ok(MatrixClass::HessRand),
            other => Err(Error::InvalidArgument(format!("unknown matrix class {other:?}"))),
        }
    }
}

fn rng_for(class: MatrixClass, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(class.stream());
    rng
}

pub fn random_unit_quaternion<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        // The all-zero draw has probability zero, but keep the sampler total.
        if let Some(u) = q.unit() {
            return u;
        }
    }
}

fn random_entry<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    let omega = random_unit_quaternion(rng);
    let alpha: f64 = rng.random();
    omega * alpha
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument("matrix size must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Dense `n × n` matrix with random entries.
pub fn fullrand(n: usize, seed: u64) -> Result<QMatrix> {
    check_size(n)?;
    let mut rng = rng_for(MatrixClass::FullRand, seed);
    Ok(QMatrix::from_fn(n, n, |_, _| random_entry(&mut rng)))
}

/// Upper Hessenberg `n × n` matrix with random nonzero entries.
pub fn hessrand(n: usize, seed: u64) -> Result<QMatrix> {
    check_size(n)?;
    let mut rng = rng_for(MatrixClass::HessRand, seed);
    Ok(QMatrix::from_fn(n, n, |i, j| {
        if i > j + 1 {
            Quaternion::ZERO
        } else {
            random_entry(&mut rng)
        }
    }))
}

/// Minimum distance between the similarity classes of two diagonal
/// entries produced by [`random_standardized_triangular`].
pub const TRIANGULAR_SEPARATION: f64 = 0.05;

/// Upper triangular `n × n` matrix with a standardized, well-separated
/// complex diagonal (real part in `[−2, 2]`, imaginary part in `[0, 2]`)
/// and random entries above it. Reads stream 2.
pub fn random_standardized_triangular(n: usize, seed: u64) -> QMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let mut diag: Vec<Quaternion> = Vec::with_capacity(n);
    while diag.len() < n {
        let re = rng.random_range(-2.0..2.0);
        let im = rng.random_range(0.0..2.0);
        let cand = Quaternion::new(re, im, 0.0, 0.0);
        let far = diag.iter().all(|d| {
            let dr = d.w - re;
            dr.hypot(d.x - im).min(dr.hypot(d.x + im)) >= TRIANGULAR_SEPARATION
        });
        if far {
            diag.push(cand);
        }
    }
    QMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Less => random_entry(&mut rng),
        std::cmp::Ordering::Equal => diag[i],
        std::cmp::Ordering::Greater => Quaternion::ZERO,
    })
}

//! Aggressive early deflation.
//!
//! The trailing `n_win × n_win` window of the active Hessenberg block is
//! brought to Schur form. The orthogonal transform turns the single
//! subdiagonal entry left of the window into a full "spike" column. Spike
//! entries are tested from the bottom up: a negligible entry is zeroed and
//! its eigenvalue deflates; otherwise the eigenvalue is swapped to the top
//! of the undecided part of the window. Finally the undeflatable block and
//! its spike are reduced back to Hessenberg form.
//!
//! All work happens on a local copy of the window and an accumulated
//! `n_win × n_win` unitary `V`; the off-window parts of `H` and `U` are
//! updated once at the end. A window that covers the whole active block
//! has no spike, so the block is simply brought to Schur form.

use crate::error::{Error, Result};
use crate::qmat::{make_reflector, QMatrix};
use crate::quat::Quaternion;
use crate::reorder::swap_adjacent;
use crate::schur::{schur_decompose, QTimer, SchurOptions};

const EPS: f64 = f64::EPSILON;

/// Smallest matrix for which the automatic schedule enables AED.
pub const AED_MIN_N: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowRule {
    /// Piecewise-constant schedule in the matrix size.
    Auto,
    /// Fixed window size (clamped to the available range).
    Fixed(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpikeRule {
    /// `|spikeᵢ| ≤ max(ε·|T(i,i)|, ε·‖W‖_F / n_win)`.
    Standard,
    /// Never deflate; every eigenvalue is undeflatable.
    NeverDeflate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AedConfig {
    pub window: WindowRule,
    /// Percentage of the window that must deflate for the next QR sweep
    /// to be skipped.
    pub nibble: f64,
    pub spike: SpikeRule,
}

impl Default for AedConfig {
    fn default() -> Self {
        Self {
            window: WindowRule::Auto,
            nibble: 14.0,
            spike: SpikeRule::Standard,
        }
    }
}

impl AedConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=100.0).contains(&self.nibble) {
            return Err(Error::InvalidArgument(format!("nibble {} outside [0, 100]", self.nibble)));
        }
        if let WindowRule::Fixed(w) = self.window {
            if w < 2 {
                return Err(Error::InvalidArgument(format!("AED window {w} below 2")));
            }
        }
        Ok(())
    }
}

/// AED window size for an `n × n` matrix, or `None` when AED is off.
///
/// | n         | n_win |
/// |-----------|-------|
/// | < 12      | off   |
/// | 12–29     | 4     |
/// | 30–59     | 6     |
/// | 60–149    | 10    |
/// | 150–589   | 24    |
/// | ≥ 590     | 64    |
pub fn aed_window_size(n: usize, cfg: &AedConfig) -> Option<usize> {
    if n < AED_MIN_N {
        return None;
    }
    let w = match cfg.window {
        WindowRule::Fixed(w) => w,
        WindowRule::Auto => match n {
            12..=29 => 4,
            30..=59 => 6,
            60..=149 => 10,
            150..=589 => 24,
            _ => 64,
        },
    };
    Some(w.clamp(2, n - 1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AedOutcome {
    pub n_win: usize,
    pub n_deflated: usize,
    pub n_undeflatable: usize,
    /// Spike right after the window Schur decomposition, before any test.
    pub spike: Vec<Quaternion>,
    /// QR sweeps spent on the window's own Schur decomposition.
    pub window_sweeps: usize,
}

impl AedOutcome {
    pub fn spike_magnitudes(&self) -> Vec<f64> {
        self.spike.iter().map(|q| q.abs()).collect()
    }

    /// True when at least `nibble` percent of the window deflated.
    pub fn skips_sweep(&self, nibble: f64) -> bool {
        self.n_win > 0 && 100.0 * self.n_deflated as f64 >= nibble * self.n_win as f64
    }
}

/// Aggregate over all AED calls of one decomposition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AedStats {
    pub calls: usize,
    pub deflated: usize,
    pub undeflatable: usize,
    pub skipped_sweeps: usize,
    pub window_sweeps: usize,
}

impl AedStats {
    pub(crate) fn record(&mut self, out: &AedOutcome) {
        self.calls += 1;
        self.deflated += out.n_deflated;
        self.undeflatable += out.n_undeflatable;
        self.window_sweeps += out.window_sweeps;
    }
}

/// One AED step on the active block `[lo, hi]` of the Hessenberg `H`,
/// accumulating into `U`. The deflated eigenvalues end up in rows
/// `hi − n_deflated + 1 ..= hi`, standardized and split off by an exact
/// zero subdiagonal.
pub fn aed_step(h: &mut QMatrix, u: &mut QMatrix, lo: usize, hi: usize, cfg: &AedConfig) -> Result<AedOutcome> {
    aed_step_timed(h, u, lo, hi, cfg, &mut QTimer::default())
}

pub(crate) fn aed_step_timed(
    h: &mut QMatrix,
    u: &mut QMatrix,
    lo: usize,
    hi: usize,
    cfg: &AedConfig,
    timer: &mut QTimer,
) -> Result<AedOutcome> {
    let n = h.nrows();
    cfg.validate()?;
    if hi >= n || lo > hi {
        return Err(Error::InvalidArgument(format!("invalid active block [{lo}, {hi}] in a {n}x{n} matrix")));
    }
    if !h.is_square() || u.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "aed_step",
            left: h.shape(),
            right: u.shape(),
        });
    }
    let nw = match cfg.window {
        WindowRule::Fixed(w) => w,
        WindowRule::Auto => aed_window_size(n.max(AED_MIN_N), cfg).expect("schedule"),
    }
    .clamp(1, hi - lo + 1);
    let kw = hi + 1 - nw;
    // A window covering the whole active block has no spike.
    let sub = if kw > lo { h[(kw, kw - 1)] } else { Quaternion::ZERO };

    // Stage 1: Schur form of the window.
    let window = h.submatrix(kw, hi + 1, kw, hi + 1);
    let inner = schur_decompose(&window, &SchurOptions::default())?;
    let mut t = inner.t;
    let mut v = inner.u;
    let mut spike: Vec<Quaternion> = (0..nw).map(|i| v[(0, i)].conj() * sub).collect();
    let initial_spike = spike.clone();

    // Stage 2: bottom-up convergence test.
    let floor = EPS * t.frob_norm() / nw as f64;
    let mut ns = nw;
    let mut top = 0;
    while top < ns {
        let k = ns - 1;
        let deflatable = match cfg.spike {
            SpikeRule::Standard => spike[k].abs() <= (EPS * t[(k, k)].abs()).max(floor),
            SpikeRule::NeverDeflate => false,
        };
        if deflatable {
            spike[k] = Quaternion::ZERO;
            ns -= 1;
        } else {
            for j in (top..k).rev() {
                let g = swap_adjacent(&mut t, &mut v, j)?;
                if !g.is_identity() {
                    g.apply_left_vec(&mut spike, j, j + 1);
                }
            }
            top += 1;
        }
    }
    let n_deflated = nw - ns;

    // Stage 3: back to Hessenberg form on the undeflatable part.
    if ns > 1 {
        let (p, beta) = make_reflector(&spike[..ns]);
        p.apply_left(&mut t, 0, 0..nw)?;
        p.apply_right(&mut t, 0..ns, 0)?;
        p.apply_right(&mut v, 0..nw, 0)?;
        spike[0] = Quaternion::real(beta);
        spike[1..ns].fill(Quaternion::ZERO);
        for k in 0..ns.saturating_sub(2) {
            let x = t.col(k)[k + 1..ns].to_vec();
            let (p, beta) = make_reflector(&x);
            p.apply_left(&mut t, k + 1, k + 1..nw)?;
            p.apply_right(&mut t, 0..ns, k + 1)?;
            p.apply_right(&mut v, 0..nw, k + 1)?;
            let col = t.col_mut(k);
            col[k + 1] = Quaternion::real(beta);
            col[k + 2..ns].fill(Quaternion::ZERO);
        }
    }

    // Write back and apply V to the rest of H and to U.
    h.set_submatrix(kw, kw, &t);
    if kw > 0 {
        for (i, s) in spike.iter().enumerate() {
            h[(kw + i, kw - 1)] = *s;
        }
    }
    if hi + 1 < n {
        let right = h.submatrix(kw, hi + 1, hi + 1, n);
        h.set_submatrix(kw, hi + 1, &v.adjoint_matmul(&right)?);
    }
    if kw > 0 {
        let above = h.submatrix(0, kw, kw, hi + 1);
        h.set_submatrix(0, kw, &above.matmul(&v)?);
    }
    timer.time(|| -> Result<()> {
        let cols = u.submatrix(0, u.nrows(), kw, hi + 1);
        u.set_submatrix(0, kw, &cols.matmul(&v)?);
        Ok(())
    })?;

    Ok(AedOutcome {
        n_win: nw,
        n_deflated,
        n_undeflatable: ns,
        spike: initial_spike,
        window_sweeps: inner.sweeps,
    })
}

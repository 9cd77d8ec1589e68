//! Single-matrix solve: factor files plus a JSON summary.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use qschur::aed::{AedConfig, AedStats, SpikeRule, WindowRule};
use qschur::eigvec::{full_eigenvectors, triangular_eigenvectors};
use qschur::oracle::{e1_orthogonality, e2_schur, e3_eigenpairs};
use qschur::qmat::{read_qmatrix, write_qmatrix};
use qschur::{reorder_selected, Error as SolverError, QMatrix, SchurOptions};

use crate::CliError;

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Clone, Debug)]
pub struct SolveConfig {
    pub input: PathBuf,
    pub out_dir: PathBuf,
    pub aed: bool,
    pub eigvec: bool,
    /// Eigenvalues flagged here are moved to the leading positions of `T`.
    pub reorder: Option<Vec<bool>>,
    pub max_sweeps: Option<usize>,
    pub nibble: f64,
    pub aed_window: WindowRule,
}

impl SolveConfig {
    pub fn new(input: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            out_dir: out_dir.into(),
            aed: false,
            eigvec: true,
            reorder: None,
            max_sweeps: None,
            nibble: 14.0,
            aed_window: WindowRule::Auto,
        }
    }
}

/// Comma-separated `0`/`1` flags, one per eigenvalue.
pub fn parse_mask(s: &str) -> Result<Vec<bool>, CliError> {
    s.split(',')
        .map(|f| match f.trim() {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(CliError::Usage(format!("reorder mask entries must be 0 or 1, got {other:?}"))),
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct AedSummary {
    pub calls: usize,
    pub deflated: usize,
    pub undeflatable: usize,
    pub skipped_sweeps: usize,
    pub window_sweeps: usize,
}

impl From<AedStats> for AedSummary {
    fn from(s: AedStats) -> Self {
        Self {
            calls: s.calls,
            deflated: s.deflated,
            undeflatable: s.undeflatable,
            skipped_sweeps: s.skipped_sweeps,
            window_sweeps: s.window_sweeps,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct MetricSummary {
    pub e1: Option<f64>,
    pub e2: Option<f64>,
    pub e3: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveSummary {
    pub input: String,
    pub n: usize,
    pub status: String,
    pub sweeps: usize,
    pub aed: Option<AedSummary>,
    /// Standardized eigenvalues as `[re, im]`, in diagonal order of `T`.
    pub eigenvalues: Vec<[f64; 2]>,
    /// Original diagonal position of each eigenvalue after reordering.
    pub permutation: Option<Vec<usize>>,
    pub metrics: MetricSummary,
    pub files: Vec<String>,
}

impl SolveSummary {
    pub fn eigenvalues_complex(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
    }
}

fn write_factor(dir: &Path, name: &str, m: &QMatrix, files: &mut Vec<String>) -> Result<(), CliError> {
    write_qmatrix(m, dir.join(name))?;
    files.push(name.to_string());
    Ok(())
}

fn write_summary(dir: &Path, summary: &SolveSummary) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(summary)?;
    fs::write(dir.join(SUMMARY_FILE), text + "\n")?;
    Ok(())
}

/// Solve one matrix file. On nonconvergence the partial Hessenberg
/// iterate `H.qmat`, `U.qmat` and the summary are still written, and
/// [`CliError::NoConvergence`] is returned.
pub fn run_solve(cfg: &SolveConfig) -> Result<SolveSummary, CliError> {
    let a = read_qmatrix(&cfg.input)?;
    if !a.is_square() {
        return Err(CliError::Usage(format!("{} is not square", cfg.input.display())));
    }
    let n = a.nrows();
    if let Some(mask) = &cfg.reorder {
        if mask.len() != n {
            return Err(CliError::Usage(format!("reorder mask has {} entries for n = {n}", mask.len())));
        }
    }
    fs::create_dir_all(&cfg.out_dir)?;
    let dir = cfg.out_dir.as_path();
    let aed = AedConfig {
        window: cfg.aed_window,
        nibble: cfg.nibble,
        spike: SpikeRule::Standard,
    };
    aed.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let opts = SchurOptions {
        use_aed: cfg.aed,
        aed,
        max_sweeps: cfg.max_sweeps,
    };
    let mut files = Vec::new();
    let mut summary = SolveSummary {
        input: cfg.input.display().to_string(),
        n,
        status: "ok".into(),
        sweeps: 0,
        aed: None,
        eigenvalues: Vec::new(),
        permutation: None,
        metrics: MetricSummary::default(),
        files: Vec::new(),
    };

    let schur = match qschur::schur_decompose(&a, &opts) {
        Ok(s) => s,
        Err(SolverError::NoConvergence { sweeps, partial }) => {
            write_factor(dir, "H.qmat", &partial.h, &mut files)?;
            write_factor(dir, "U.qmat", &partial.u, &mut files)?;
            summary.status = "no_convergence".into();
            summary.sweeps = sweeps;
            summary.metrics.e1 = Some(e1_orthogonality(&partial.u));
            summary.files = files;
            write_summary(dir, &summary)?;
            return Err(CliError::NoConvergence { sweeps });
        }
        Err(e) => return Err(e.into()),
    };
    summary.sweeps = schur.sweeps;
    summary.aed = schur.aed_stats.map(AedSummary::from);
    let (mut t, mut u) = (schur.t, schur.u);
    if let Some(mask) = &cfg.reorder {
        summary.permutation = Some(reorder_selected(&mut t, &mut u, mask)?);
    }
    summary.eigenvalues = t.diagonal().iter().map(|d| [d.w, d.x]).collect();
    summary.metrics.e1 = Some(e1_orthogonality(&u));
    summary.metrics.e2 = Some(e2_schur(&a, &u, &t)?);
    write_factor(dir, "T.qmat", &t, &mut files)?;
    write_factor(dir, "U.qmat", &u, &mut files)?;

    if cfg.eigvec {
        match triangular_eigenvectors(&t) {
            Ok(es) => {
                let x = full_eigenvectors(&u, &es)?;
                summary.metrics.e3 = Some(e3_eigenpairs(&a, &x, &es.lambdas)?);
                let lambda = QMatrix::from_col_major(n, 1, t.diagonal())?;
                write_factor(dir, "X.qmat", &x, &mut files)?;
                write_factor(dir, "Lambda.qmat", &lambda, &mut files)?;
            }
            Err(SolverError::NonDistinctSpectrum { .. }) => summary.status = "eigvec_failed".into(),
            Err(e) => return Err(e.into()),
        }
    }
    summary.files = files;
    write_summary(dir, &summary)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn masks() {
        assert_eq!(parse_mask("0,1").unwrap(), vec![false, true]);
        assert_eq!(parse_mask("1, 0 ,1").unwrap(), vec![true, false, true]);
        assert!(parse_mask("0,2").is_err());
        assert!(parse_mask("").is_err());
    }
}

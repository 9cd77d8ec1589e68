//! Benchmark grid: one CSV row per (class, n, strategy, seed) cell.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use qschur::aed::{AedConfig, SpikeRule, WindowRule};
use qschur::eigvec::{full_eigenvectors, triangular_eigenvectors};
use qschur::oracle::{e1_orthogonality, e2_schur, e3_eigenpairs};
use qschur::{Error as SolverError, MatrixClass, SchurOptions};

use crate::CliError;

pub const CSV_HEADER: [&str; 12] = [
    "strategy", "class", "n", "seed", "status", "sweeps", "t_total_s", "t_q_s", "t_aed_s", "e1", "e2", "e3",
];

/// Columns excluded from determinism comparisons.
pub const TIMING_COLUMNS: [&str; 3] = ["t_total_s", "t_q_s", "t_aed_s"];

pub const DEFAULT_SIZES: [usize; 4] = [32, 64, 128, 256];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    Qr,
    QrAed,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Qr => "qr",
            Strategy::QrAed => "qr+aed",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "qr" => Ok(Strategy::Qr),
            "qr+aed" => Ok(Strategy::QrAed),
            other => Err(CliError::Usage(format!("unknown strategy {other:?} (expected qr or qr+aed)"))),
        }
    }
}

/// `auto` or a fixed window size.
pub fn parse_aed_window(s: &str) -> Result<WindowRule, CliError> {
    if s == "auto" {
        return Ok(WindowRule::Auto);
    }
    match s.parse::<usize>() {
        Ok(w) if w >= 2 => Ok(WindowRule::Fixed(w)),
        _ => Err(CliError::Usage(format!("--aed-window expects auto or an integer ≥ 2, got {s:?}"))),
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub classes: Vec<MatrixClass>,
    pub sizes: Vec<usize>,
    pub strategies: Vec<Strategy>,
    pub trials: usize,
    /// Trial `t` uses seed `seed + t`.
    pub seed: u64,
    pub max_sweeps: Option<usize>,
    pub nibble: f64,
    pub aed_window: WindowRule,
    pub eigvec: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            classes: vec![MatrixClass::FullRand],
            sizes: DEFAULT_SIZES.to_vec(),
            strategies: vec![Strategy::Qr, Strategy::QrAed],
            trials: 5,
            seed: 0,
            max_sweeps: None,
            nibble: 14.0,
            aed_window: WindowRule::Auto,
            eigvec: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.classes.is_empty() || self.sizes.is_empty() || self.strategies.is_empty() {
            return Err(CliError::Usage("class, size and strategy lists must be nonempty".into()));
        }
        if self.sizes.contains(&0) {
            return Err(CliError::Usage("sizes must be positive".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be positive".into()));
        }
        self.aed_config().validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(())
    }

    pub fn aed_config(&self) -> AedConfig {
        AedConfig {
            window: self.aed_window,
            nibble: self.nibble,
            spike: SpikeRule::Standard,
        }
    }

    pub fn schur_options(&self, strategy: Strategy) -> SchurOptions {
        SchurOptions {
            use_aed: strategy == Strategy::QrAed,
            aed: self.aed_config(),
            max_sweeps: self.max_sweeps,
        }
    }

    pub fn cell_count(&self) -> usize {
        self.classes.len() * self.sizes.len() * self.strategies.len() * self.trials
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NoConvergence,
    EigvecFailed,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::NoConvergence => "no_convergence",
            Status::EigvecFailed => "eigvec_failed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub strategy: Strategy,
    pub class: MatrixClass,
    pub n: usize,
    pub seed: u64,
    pub status: Status,
    pub sweeps: usize,
    pub t_total: f64,
    pub t_q: f64,
    /// `None` for the plain QR strategy.
    pub t_aed: Option<f64>,
    pub e1: Option<f64>,
    pub e2: Option<f64>,
    pub e3: Option<f64>,
}

fn fmt_float(x: Option<f64>) -> String {
    match x {
        Some(v) => format!("{v:e}"),
        None => "N/A".to_string(),
    }
}

impl BenchRow {
    pub fn record(&self) -> [String; 12] {
        [
            self.strategy.name().to_string(),
            self.class.name().to_string(),
            self.n.to_string(),
            self.seed.to_string(),
            self.status.name().to_string(),
            self.sweeps.to_string(),
            fmt_float(Some(self.t_total)),
            fmt_float(Some(self.t_q)),
            fmt_float(self.t_aed),
            fmt_float(self.e1),
            fmt_float(self.e2),
            fmt_float(self.e3),
        ]
    }
}

/// Run a single cell of the grid.
pub fn run_cell(cfg: &BenchConfig, strategy: Strategy, class: MatrixClass, n: usize, seed: u64) -> Result<BenchRow, CliError> {
    let a = class.generate(n, seed)?;
    let start = Instant::now();
    let mut row = BenchRow {
        strategy,
        class,
        n,
        seed,
        status: Status::Ok,
        sweeps: 0,
        t_total: 0.0,
        t_q: 0.0,
        t_aed: None,
        e1: None,
        e2: None,
        e3: None,
    };
    let schur = match qschur::schur_decompose(&a, &cfg.schur_options(strategy)) {
        Ok(s) => s,
        Err(SolverError::NoConvergence { sweeps, partial }) => {
            row.status = Status::NoConvergence;
            row.sweeps = sweeps;
            row.t_total = start.elapsed().as_secs_f64();
            row.e1 = Some(e1_orthogonality(&partial.u));
            return Ok(row);
        }
        Err(e) => return Err(e.into()),
    };
    row.sweeps = schur.sweeps;
    row.t_q = schur.timings.construct_q.as_secs_f64();
    if strategy == Strategy::QrAed {
        row.t_aed = Some(schur.timings.aed.as_secs_f64());
    }
    row.e1 = Some(e1_orthogonality(&schur.u));
    row.e2 = Some(e2_schur(&a, &schur.u, &schur.t)?);
    if cfg.eigvec {
        match triangular_eigenvectors(&schur.t) {
            Ok(es) => {
                let x = full_eigenvectors(&schur.u, &es)?;
                row.e3 = Some(e3_eigenpairs(&a, &x, &es.lambdas)?);
            }
            Err(SolverError::NonDistinctSpectrum { .. }) => row.status = Status::EigvecFailed,
            Err(e) => return Err(e.into()),
        }
    }
    row.t_total = start.elapsed().as_secs_f64();
    Ok(row)
}

/// Run the whole grid in a fixed order (class, n, strategy, trial),
/// handing each row to `sink` as soon as it is ready.
pub fn run_bench_with(cfg: &BenchConfig, mut sink: impl FnMut(&BenchRow) -> Result<(), CliError>) -> Result<Vec<BenchRow>, CliError> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.cell_count());
    for &class in &cfg.classes {
        for &n in &cfg.sizes {
            for &strategy in &cfg.strategies {
                for t in 0..cfg.trials {
                    let row = run_cell(cfg, strategy, class, n, cfg.seed.wrapping_add(t as u64))?;
                    sink(&row)?;
                    rows.push(row);
                }
            }
        }
    }
    Ok(rows)
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>, CliError> {
    run_bench_with(cfg, |_| Ok(()))
}

pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(inner: W) -> Result<Self, CliError> {
        let mut writer = csv::Writer::from_writer(inner);
        writer.write_record(CSV_HEADER)?;
        Ok(Self { writer })
    }

    pub fn push(&mut self, row: &BenchRow) -> Result<(), CliError> {
        self.writer.write_record(row.record())?;
        self.writer.flush()?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W, CliError> {
        self.writer.flush()?;
        self.writer.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

pub fn rows_to_csv(rows: &[BenchRow]) -> Result<String, CliError> {
    let mut sink = CsvSink::new(Vec::new())?;
    for r in rows {
        sink.push(r)?;
    }
    Ok(String::from_utf8(sink.finish()?).expect("CSV output is UTF-8"))
}

/// Per-cell medians over trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellSummary {
    pub strategy: String,
    pub class: String,
    pub n: usize,
    pub trials: usize,
    pub converged: usize,
    pub median_sweeps: Option<f64>,
    pub median_t_total_s: Option<f64>,
    pub median_t_q_s: Option<f64>,
    pub median_t_aed_s: Option<f64>,
    pub median_e1: Option<f64>,
    pub median_e2: Option<f64>,
    pub median_e3: Option<f64>,
}

pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Group rows by (class, n, strategy) in first-seen order. Only converged
/// rows enter the medians.
pub fn summarize(rows: &[BenchRow]) -> Vec<CellSummary> {
    let mut keys: Vec<(MatrixClass, usize, Strategy)> = Vec::new();
    for r in rows {
        let k = (r.class, r.n, r.strategy);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(class, n, strategy)| {
            let cell: Vec<&BenchRow> = rows.iter().filter(|r| (r.class, r.n, r.strategy) == (class, n, strategy)).collect();
            let ok: Vec<&&BenchRow> = cell.iter().filter(|r| r.status != Status::NoConvergence).collect();
            let col = |f: &dyn Fn(&BenchRow) -> Option<f64>| median(&ok.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
            CellSummary {
                strategy: strategy.name().to_string(),
                class: class.name().to_string(),
                n,
                trials: cell.len(),
                converged: ok.len(),
                median_sweeps: col(&|r| Some(r.sweeps as f64)),
                median_t_total_s: col(&|r| Some(r.t_total)),
                median_t_q_s: col(&|r| Some(r.t_q)),
                median_t_aed_s: col(&|r| r.t_aed),
                median_e1: col(&|r| r.e1),
                median_e2: col(&|r| r.e2),
                median_e3: col(&|r| r.e3),
            }
        })
        .collect()
}

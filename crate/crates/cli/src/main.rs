use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qschur::MatrixClass;
use qschur_cli::bench::{parse_aed_window, run_bench_with, summarize, BenchConfig, CsvSink, Strategy, DEFAULT_SIZES};
use qschur_cli::solve::{parse_mask, run_solve, SolveConfig};
use qschur_cli::CliError;

#[derive(Parser)]
#[command(name = "qschur", version, about = "Quaternion Schur decomposition and eigenvectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a grid of random matrices and emit one CSV row per cell.
    Bench(BenchArgs),
    /// Decompose a single qmat file and write its factors.
    Solve(SolveArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct SolverArgs {
    /// Sweep budget for the full matrix (default 30·n).
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Percentage of the AED window that must deflate to skip a sweep.
    #[arg(long, default_value_t = 14.0)]
    nibble: f64,
    /// AED window size: `auto` or an integer.
    #[arg(long, default_value = "auto")]
    aed_window: String,
    #[arg(long, value_enum, default_value = "on")]
    eigvec: Toggle,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "fullrand")]
    class: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[arg(long, alias = "strategy", value_delimiter = ',', default_value = "qr,qr+aed")]
    strategies: Vec<String>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    /// Base seed; trial t uses seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write per-cell medians as JSON to this path.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Enable aggressive early deflation.
    #[arg(long)]
    aed: bool,
    /// Comma-separated 0/1 flags; flagged eigenvalues are moved to the front.
    #[arg(long)]
    reorder: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    let classes = args
        .class
        .iter()
        .map(|c| c.parse::<MatrixClass>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let strategies = args.strategies.iter().map(|s| s.parse::<Strategy>()).collect::<Result<Vec<_>, _>>()?;
    let cfg = BenchConfig {
        classes,
        sizes: args.sizes.unwrap_or_else(|| DEFAULT_SIZES.to_vec()),
        strategies,
        trials: args.trials,
        seed: args.seed,
        max_sweeps: args.solver.max_sweeps,
        nibble: args.solver.nibble,
        aed_window: parse_aed_window(&args.solver.aed_window)?,
        eigvec: matches!(args.solver.eigvec, Toggle::On),
    };
    cfg.validate()?;
    let out: Box<dyn Write> = match &args.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = CsvSink::new(out)?;
    let rows = run_bench_with(&cfg, |row| sink.push(row))?;
    sink.finish()?;
    if let Some(path) = args.summary {
        let text = serde_json::to_string_pretty(&summarize(&rows))?;
        std::fs::write(path, text + "\n")?;
    }
    Ok(())
}

fn solve(args: SolveArgs) -> Result<(), CliError> {
    let cfg = SolveConfig {
        input: args.input,
        out_dir: args.out_dir,
        aed: args.aed,
        eigvec: matches!(args.solver.eigvec, Toggle::On),
        reorder: args.reorder.as_deref().map(parse_mask).transpose()?,
        max_sweeps: args.solver.max_sweeps,
        nibble: args.solver.nibble,
        aed_window: parse_aed_window(&args.solver.aed_window)?,
    };
    let summary = run_solve(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(a) => bench(a),
        Command::Solve(a) => solve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

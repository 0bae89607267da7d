use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use abtree::{Params, WORKERS_ENV};
use abtree_bench::{default_iterations, run_experiment, Algo, Dist, DistParams, ExperimentConfig};
use clap::Parser;

/// Runs one experiment and writes a CSV row per iteration.
#[derive(Debug, Parser)]
#[command(name = "abtree-bench", version)]
struct Cli {
    /// Elements in the initial tree.
    #[arg(long, default_value_t = 100_000)]
    tree_size: usize,
    /// Keys per bulk update or per second operand of a set operation.
    #[arg(long, default_value_t = 1000)]
    bulk_size: usize,
    /// Iterations; defaults to 4e9 / bulk size, capped at 20.
    #[arg(long)]
    iterations: Option<usize>,
    /// Worker threads.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t = Dist::Uniform)]
    dist: Dist,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Algo::BulkAuto)]
    algo: Algo,
    /// Emit the work counter columns.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    counters: bool,
    /// Emit wall-clock times; rows then differ between runs.
    #[arg(long)]
    timing: bool,
    /// Pieces for the split and join experiments.
    #[arg(long, default_value_t = 31)]
    parts: usize,
    /// Node degree bounds as `a,b`.
    #[arg(long, default_value = "4,8")]
    degrees: String,
    /// Window divisor for skewed_uniform.
    #[arg(long, default_value_t = 64)]
    skew: u32,
    /// Mean of the normal distribution as a fraction of the key space.
    #[arg(long, default_value_t = 0.5)]
    mean: f64,
    /// Standard deviation of the normal distribution as a fraction of the key space.
    #[arg(long, default_value_t = 0.125)]
    stddev: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_degrees(s: &str) -> Result<Params, String> {
    let (a, b) = s.split_once(',').ok_or("degrees must look like 4,8")?;
    let a = a.trim().parse().map_err(|_| format!("bad a in {s}"))?;
    let b = b.trim().parse().map_err(|_| format!("bad b in {s}"))?;
    Params::new(a, b).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> Result<(), String> {
    let cfg = ExperimentConfig {
        tree_size: cli.tree_size,
        bulk_size: cli.bulk_size,
        iterations: cli
            .iterations
            .unwrap_or_else(|| default_iterations(cli.bulk_size)),
        workers: cli
            .workers
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())),
        dist: cli.dist,
        dist_params: DistParams {
            skew: cli.skew,
            mean: cli.mean,
            stddev: cli.stddev,
        },
        seed: cli.seed,
        algo: cli.algo,
        params: parse_degrees(&cli.degrees)?,
        parts: cli.parts,
        counters: cli.counters,
        timing: cli.timing,
    };
    let out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| format!("{}: {e}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    run_experiment(&cfg, out).map(|_| ())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("abtree-bench: {e}");
            ExitCode::FAILURE
        }
    }
}

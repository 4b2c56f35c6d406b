use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sng_dbscan::{DistanceSpec, NoisePolicy};

#[derive(Debug, Parser)]
#[command(name = "sng", version, about = "Sampled neighborhood graph DBSCAN")]
pub struct Cli {
    /// Worker threads for parallel stages (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cluster a dataset and write one label per line (-1 = noise).
    Cluster(ClusterArgs),
    /// Compare predicted labels with ground truth (ARI, AMI).
    Score(ScoreArgs),
    /// Generate a synthetic dataset from a key=value scenario file.
    Gen(GenArgs),
    /// Time sampled (and optionally exact) clustering over an eps grid.
    Bench(BenchArgs),
    /// Run one of the statistical experiments and print its report.
    Theory(TheoryArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Dataset: CSV, or the binary format when the name ends in `.bin`.
    #[arg(long)]
    pub input: PathBuf,
    /// The CSV has a header line.
    #[arg(long)]
    pub header: bool,
    /// CSV column (0-based) holding class labels.
    #[arg(long)]
    pub label_column: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Per-vertex sampling rate in (0, 1].
    #[arg(long, default_value_t = 1.0, value_parser = parse_rate)]
    pub rate: f64,
    #[arg(long, env = "SNG_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "euclidean", value_parser = parse_dist)]
    pub dist: DistanceSpec,
    /// Use max(2, floor(min_pts * rate)) as the core threshold.
    #[arg(long)]
    pub minpts_scale: bool,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_parser = parse_positive)]
    pub eps: f64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_pts: u64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    /// Labels file (default: the input path with extension `.labels`).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Print the run summary as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, default_value = "own-cluster", value_parser = parse_policy)]
    pub noise_policy: NoisePolicy,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Scenario file of `key = value` lines.
    #[arg(long)]
    pub config: PathBuf,
    /// Output dataset: CSV with a trailing truth column, or binary for `.bin`.
    #[arg(long)]
    pub output: PathBuf,
    /// Also write truth labels, one per line.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Override the file's `n`.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    /// Override the file's `seed`.
    #[arg(long, env = "SNG_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated eps values.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_positive)]
    pub eps: Vec<f64>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_pts: u64,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    /// Also run exact DBSCAN on every eps.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, default_value = "own-cluster", value_parser = parse_policy)]
    pub noise_policy: NoisePolicy,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Window,
    Mincut,
    Karger,
    Recovery,
    Levelset,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    /// Scenario file (same format as `gen`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_positive)]
    pub eps: Option<f64>,
    /// Sampling rate (window, levelset).
    #[arg(long, value_parser = parse_rate)]
    pub rate: Option<f64>,
    /// Sample size (window).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Vec<usize>,
    /// Draws per grid point.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub seeds: Option<u64>,
    /// Comma-separated edge probabilities (karger).
    #[arg(long, value_delimiter = ',', value_parser = parse_probability)]
    pub s_grid: Vec<f64>,
    /// Trials per edge probability (karger).
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Graph for karger: `complete:N` or `ball:N` (exact eps-graph of N
    /// points from the scenario's first cluster).
    #[arg(long, default_value = "complete:20")]
    pub graph: String,
    /// `c` in the rate min(1, c ln n / n) (recovery).
    #[arg(long, default_value_t = 20.0, value_parser = parse_positive)]
    pub multiplier: f64,
    /// Fixed min_pts instead of the calibrated one (levelset).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_pts: Option<u64>,
    /// Analytic level-set sample size (levelset).
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub truth_samples: u64,
    #[arg(long, env = "SNG_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    /// Exit with status 1 when the experiment's check fails.
    #[arg(long)]
    pub assert: bool,
}

fn parse_rate(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("rate must lie in (0, 1], got {s}"))
    }
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("edge probability must lie in [0, 1], got {s}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive finite number, got {s}"))
    }
}

fn parse_dist(s: &str) -> Result<DistanceSpec, String> {
    s.parse().map_err(|e: sng_dbscan::Error| e.to_string())
}

fn parse_policy(s: &str) -> Result<NoisePolicy, String> {
    s.parse().map_err(|e: sng_dbscan::Error| e.to_string())
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Polar representations of Pareto fronts and their random-set statistics.
///
/// Every command is deterministic given its inputs, flags and `--seed`.
/// Output is JSON on stdout unless `--out` is given. Exit status is 0 on
/// success, 2 on invalid arguments and 3 on unreadable or insufficient data.
#[derive(Debug, Parser)]
#[command(name = "polarfront", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polar front of a point set.
    Front(FrontArgs),
    /// Statistics of a front ensemble or objective table.
    Stats(StatsArgs),
    /// Per-direction statistics of a lower-dimensional slice.
    Slices(SliceArgs),
    /// Gumbel limit and conditional excess probabilities for Weibull objectives.
    Evt(EvtArgs),
    /// Day-bootstrap domination maps between two years of a pollutant series.
    Pollution(PollutionArgs),
    /// Input whose sampled outcomes best match a target vector.
    Decide(DecideArgs),
    /// HTTP/JSON service over a loaded ensemble.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    /// Equi-angular for two objectives, Monte Carlo otherwise.
    Auto,
    /// Midpoint rule in angle (two objectives only).
    EquiAngular,
    /// Normalised absolute Gaussian draws.
    Mc,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Number of grid directions.
    #[arg(long, default_value_t = 1024)]
    pub grid_k: usize,
    /// Seed of a Monte Carlo grid.
    #[arg(long, default_value_t = 0)]
    pub grid_seed: u64,
    #[arg(long, value_enum, default_value_t = Scheme::Auto)]
    pub grid_scheme: Scheme,
    /// Direction grid JSON; overrides the other grid flags.
    #[arg(long, value_name = "FILE")]
    pub grid: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Reference vector, comma-separated. Defaults to `l - 0.2 (u - l)` for
    /// the observed bounds `l`, `u`.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        value_name = "LIST"
    )]
    pub eta: Option<Vec<f64>>,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output file; stdout when absent.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FrontArgs {
    /// JSON array of objective vectors, or `{"points": [...], "reference": [...]}`.
    pub points: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Also write the boundary points as CSV.
    #[arg(long, value_name = "FILE")]
    pub polyline: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stat {
    Mean,
    Quantile,
    VorobevQuantile,
    VorobevMean,
    Deviation,
    Bootstrap,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Ensemble JSON (`reference`, `grid`, `lengths`) or objective table
    /// (`inputs`, `samples`, optionally wrapped as `{"table": ...}`).
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Stat::Mean, Stat::Quantile, Stat::VorobevMean])]
    pub stat: Vec<Stat>,
    /// Quantile levels.
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.5, 0.95])]
    pub alpha: Vec<f64>,
    /// Deviation surface width in standard deviations.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Bayesian bootstrap rounds.
    #[arg(long, default_value_t = 100)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Relative hypervolume tolerance of the Vorob'ev mean search.
    #[arg(long, default_value_t = 1e-3)]
    pub hv_tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    /// Ensemble JSON or objective table.
    pub input: PathBuf,
    #[command(flatten)]
    pub common: Common,
    /// Kept objective indices, zero-based and increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    pub kept: Vec<usize>,
    /// Fixed components for the other objectives, in index order.
    #[arg(long, value_delimiter = ',')]
    pub v: Vec<f64>,
    /// Directions of the slice sub-grid.
    #[arg(long, default_value_t = 181)]
    pub sub_k: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.95])]
    pub alpha: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct EvtArgs {
    /// Weibull shape shared by all objectives.
    #[arg(long)]
    pub shape: f64,
    /// Weibull rate per objective.
    #[arg(long, value_delimiter = ',', required = true)]
    pub rates: Vec<f64>,
    /// Direction weights; equal weights when absent.
    #[arg(long, value_delimiter = ',')]
    pub direction: Option<Vec<f64>>,
    /// Samples per block maximum.
    #[arg(long, default_value_t = 256)]
    pub block: usize,
    /// Number of block maxima.
    #[arg(long, default_value_t = 5000)]
    pub reps: usize,
    /// Samples for the excess probabilities.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Threshold as a quantile level of the sampled lengths.
    #[arg(long, default_value_t = 0.9)]
    pub threshold_quantile: f64,
    /// Model excess probabilities at which to evaluate.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5, 0.75, 0.9])]
    pub levels: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PollutionArgs {
    /// CSV with a `timestamp` column followed by one column per pollutant.
    pub csv: PathBuf,
    #[arg(long)]
    pub before: i32,
    #[arg(long)]
    pub after: i32,
    /// Pollutant columns to use; all when absent.
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    #[arg(long, default_value_t = 200)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directions of the two-objective evaluation lattice.
    #[arg(long, default_value_t = 32)]
    pub lattice_k: usize,
    /// Radii per lattice direction.
    #[arg(long, default_value_t = 25)]
    pub radii: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scoring {
    Squared,
    Pinball,
    HvAbsolute,
}

#[derive(Debug, Args)]
pub struct DecideArgs {
    /// Objective table JSON.
    pub table: PathBuf,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    pub target: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        value_name = "LIST"
    )]
    pub eta: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Scoring::Squared)]
    pub scoring: Scoring,
    /// Pinball level.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Ensemble or objective-table source JSON.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    /// Directory served for paths outside the API.
    #[arg(long, value_name = "DIR")]
    pub static_dir: Option<PathBuf>,
    /// Grid size for table sources without a grid.
    #[arg(long, default_value_t = 1024)]
    pub grid_k: usize,
    #[arg(long, default_value_t = 0)]
    pub grid_seed: u64,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "regshrink",
    version,
    about = "Shrinkage, penalized regression and weighting experiments"
)]
pub struct Cli {
    /// Worker threads for parallel work (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one model, or a whole penalty path when no lambda is given.
    Fit(FitArgs),
    /// K-fold cross-validation along a penalty path or a shrinkage grid.
    Cv(CvArgs),
    /// Standard lasso vs. equal-weights lasso on shared folds.
    Compare(CompareArgs),
    /// Monte Carlo study of cross-validated slope shrinkage.
    Simulate(SimulateArgs),
    /// Unit, sd, inverse-sd and least-squares composites on a test set.
    CompareWeights(CompareWeightsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModel {
    Ols,
    Lasso,
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CvModel {
    Lasso,
    Equal,
    /// Slope shrinkage factor for a single predictor.
    Shrink,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV with a header row.
    pub data: PathBuf,
    /// Response column (default: last column).
    #[arg(long)]
    pub response: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file (default: stdout).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Significant digits in numeric output.
    #[arg(long, default_value_t = regshrink::report::DEFAULT_PRECISION)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct PenaltyArgs {
    /// Elastic-net mixing: 1 is the lasso, 0 is ridge.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Standardize predictors before penalizing (standard model only).
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub standardize: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = FitModel::Ols)]
    pub model: FitModel,
    #[command(flatten)]
    pub penalty: PenaltyArgs,
    /// Single penalty value; omit to fit the default 100-point path.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Recorded in the output header; fits themselves are deterministic.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = CvModel::Lasso)]
    pub model: CvModel,
    #[command(flatten)]
    pub penalty: PenaltyArgs,
    /// Number of cross-validation folds.
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Seed of the fold assignment.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Coefficients at the min and 1-SE choices (default: next to --out as
    /// `<stem>_coefficients.csv`; not written when the curve goes to stdout).
    #[arg(long)]
    pub coef_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub penalty: PenaltyArgs,
    /// Number of cross-validation folds.
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Seed of the fold assignment.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Directory for coefficients.csv, cv_standard.csv and cv_equal.csv.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Significant digits in numeric output.
    #[arg(long, default_value_t = regshrink::report::DEFAULT_PRECISION)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// `key = value` file; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Replications per cell (default 1000).
    #[arg(long)]
    pub reps: Option<usize>,
    /// Comma-separated sample sizes (default 25,50,100,200).
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Option<Vec<usize>>,
    /// Comma-separated true-score validities (default 0.20,0.25,...,0.40).
    #[arg(long, value_delimiter = ',')]
    pub r_grid: Option<Vec<f64>>,
    /// Comma-separated reliabilities (default 1,0.9,...,0.5).
    #[arg(long, value_delimiter = ',')]
    pub rho_grid: Option<Vec<f64>>,
    /// Validation sample size per replication (default 1000).
    #[arg(long)]
    pub validation_n: Option<usize>,
    /// Cross-validation folds per replication (default 10).
    #[arg(long)]
    pub folds: Option<usize>,
    /// Master seed; every replication derives its own stream from it (default 1).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for summary.csv (written one cell at a time) and
    /// config.txt.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Keep finished cells of an existing run with the same configuration.
    #[arg(long)]
    pub resume: bool,
    /// Significant digits in numeric output.
    #[arg(long, default_value_t = regshrink::report::DEFAULT_PRECISION)]
    pub precision: usize,
}

#[derive(Debug, Args)]
pub struct CompareWeightsArgs {
    /// Calibration CSV.
    #[command(flatten)]
    pub data: DataArgs,
    /// Held-out CSV with the same columns; without it the data are split at
    /// random.
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// Share of rows used for calibration when splitting.
    #[arg(long, default_value_t = 0.5)]
    pub train_frac: f64,
    /// Seed of the random split.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

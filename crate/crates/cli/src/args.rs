use crate::output::Format;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "freqfdr",
    version,
    about = "Bayesian false discovery (δ_n) and false acceptance (ε_n) rates of one-sided tests",
    long_about = "Bayesian false discovery (δ_n) and false acceptance (ε_n) rates of one-sided tests of \
                  θ ≤ θ0 against θ > θ0, by third-order series, quadrature of the exact power, or simulation.\n\n\
                  Output goes to --output, else to $FREQFDR_OUTPUT_DIR/<command>.<csv|json>, else to stdout.\n\
                  Exit codes: 0 ok, 2 configuration error, 3 numerical non-convergence, 1 other failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Series coefficients (a, ã, c, d) for each α.
    Coeffs(CoeffsArgs),
    /// δ_n and ε_n at given α and n values, exact and/or by series.
    Rates(RatesArgs),
    /// Rates (or coefficients) over an α grid given as start:end:step.
    Sweep(SweepArgs),
    /// Monte-Carlo groupwise FDR with m experiments per replication.
    Sim(SimArgs),
    /// Smallest n with δ_n ≤ α over a grid of prior scales τ.
    Nalpha(NalphaArgs),
    /// δ_n and ε_n as the prior scale shrinks or grows, with the τ → 0 limits.
    Spiky(SpikyArgs),
    /// Mean versus median test for the normal model under one prior.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    Mean,
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Exact,
    Series,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Data model: normal-mean, normal, exp-rate, cauchy or gumbel.
    #[arg(long, default_value = "normal")]
    pub model: String,
    /// Prior: normal:τ, t:m:τ, cauchy:τ, gamma-mode1:r or f-mode1:r:s.
    #[arg(long, default_value = "normal:1")]
    pub prior: String,
    /// Test statistic; defaults to mean for normal and exp-rate, median for cauchy and gumbel.
    #[arg(long, value_enum)]
    pub statistic: Option<StatisticArg>,
    /// Null boundary θ0 in the model's own parameterization (default 0, or 1 for exp-rate).
    #[arg(long, allow_negative_numbers = true)]
    pub theta0: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct IoArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; overrides FREQFDR_OUTPUT_DIR.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Worker threads (0 = all cores). Results never depend on it.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Clone, Args)]
pub struct QuadArgs {
    /// Absolute tolerance of the adaptive quadrature.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated significance levels.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub alpha: Vec<f64>,
    /// Sample size; only its parity matters, and only for the median.
    #[arg(long, default_value_t = 10)]
    pub n: u64,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated significance levels.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub alpha: Vec<f64>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub n: Vec<u64>,
    /// Exact quadrature, third-order series, or both side by side.
    #[arg(long, value_enum, default_value = "both")]
    pub method: MethodArg,
    /// Series order (1 to 3).
    #[arg(long, default_value_t = 3)]
    pub order: u8,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Tabulate δ_n and ε_n (the default).
    #[arg(long, conflicts_with = "coeffs")]
    pub rates: bool,
    /// Tabulate series coefficients instead of rates.
    #[arg(long)]
    pub coeffs: bool,
    /// α grid as start:end:step, e.g. 0.01:0.30:0.01.
    #[arg(long)]
    pub alpha_grid: String,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub n: Vec<u64>,
    /// Exact quadrature, third-order series, or both side by side.
    #[arg(long, value_enum, default_value = "both")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 3)]
    pub order: u8,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Seed of every random stream; required.
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated numbers of experiments per replication.
    #[arg(long, value_delimiter = ',', default_value = "20000")]
    pub m: Vec<u64>,
    /// Sample size per experiment.
    #[arg(long, default_value_t = 10)]
    pub n: u64,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Independent replications of the m experiments.
    #[arg(long, default_value_t = 1)]
    pub replications: u64,
    /// One row per m with pooled estimates and the exact δ_n, instead of one row per replication.
    #[arg(long)]
    pub summary: bool,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Args)]
pub struct NalphaArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated significance levels.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub alpha: Vec<f64>,
    /// Comma-separated prior scales; default is 25 log-spaced values from 0.2 to 5.
    #[arg(long, value_delimiter = ',')]
    pub tau: Option<Vec<f64>>,
    /// Largest n scanned.
    #[arg(long, default_value_t = 100)]
    pub n_max: u64,
    /// Exact quadrature, third-order series, or both side by side.
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Args)]
pub struct SpikyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.01,0.1,1,10,100,1000")]
    pub tau: Vec<f64>,
    /// Sample size per experiment.
    #[arg(long, default_value_t = 10)]
    pub n: u64,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Prior: normal:τ, t:m:τ, cauchy:τ, gamma-mode1:r or f-mode1:r:s.
    #[arg(long, default_value = "normal:1")]
    pub prior: String,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub theta0: f64,
    /// Comma-separated significance levels.
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    pub alpha: Vec<f64>,
    /// Comma-separated sample sizes.
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub n: Vec<u64>,
    #[command(flatten)]
    pub quad: QuadArgs,
    #[command(flatten)]
    pub io: IoArgs,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::output::Format;
use crate::series::SeriesArgs;

#[derive(Debug, Parser)]
#[command(
    name = "fratio",
    version,
    about = "Fourier-ratio analysis of signals on ℤ_N"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GlobalArgs {
    /// Master seed; every random draw derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Omit the wall-clock field so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Write all artifacts (JSON report and CSV tables) here instead of
    /// standard output.
    #[arg(long, global = true, env = "FRATIO_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier ratio, bi-ratio, coherence, numerical sparsity and norms.
    Analyze(AnalyzeArgs),
    /// Low-degree trigonometric approximation with a reconstruction table.
    Approx(ApproxArgs),
    /// Fill gaps by ℓ¹ spectral minimization.
    Impute(ImputeArgs),
    /// Recovery success rate against the number of samples.
    Sweep(SweepArgs),
    /// Stability of the ratio under random restriction.
    Restrict(RestrictArgs),
    /// Talagrand / Bourgain constant estimates over a (N, q) grid.
    Constants(ConstantsArgs),
    /// Noise-stability experiments.
    Noise(NoiseArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Also list frequencies with |f̂(m)| ≥ η ‖f‖₂/√N.
    #[arg(long, value_name = "ETA")]
    pub large_spectrum: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxMode {
    L2,
    Linf,
    L1,
    Truncate,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, value_enum, default_value_t = ApproxMode::L2)]
    pub mode: ApproxMode,
    /// Relative accuracy.
    #[arg(long, default_value_t = 0.25)]
    pub eta: f64,
    #[arg(long, default_value_t = 50)]
    pub max_attempts: usize,
    /// Quantize the result and report its bit length and distortion at
    /// accuracy η.
    #[arg(long)]
    pub encode: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub solver_tol: f64,
    #[arg(long, default_value_t = 50_000)]
    pub max_iters: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ImputeArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// 0/1 column marking observed rows. Defaults to a column named
    /// `observed`; without one, empty cells and `NaN` are missing.
    #[arg(long)]
    pub observed_column: Option<String>,
    /// Relative noise level ε; 0 enforces exact agreement on observed rows.
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    /// Known ‖f‖₂ of the complete signal, for the oracle error bound.
    #[arg(long)]
    pub reference_l2: Option<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long = "n", default_value_t = 256)]
    pub domain_size: usize,
    #[arg(long, default_value_t = 5)]
    pub sparsity: usize,
    /// Sample counts to try.
    #[arg(long, value_delimiter = ',', default_values_t = vec![20usize, 40, 60, 80, 100, 120])]
    pub q: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub success_tol: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RestrictArgs {
    /// Series to restrict; a random unimodular signal is used when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long = "n", default_value_t = 4096)]
    pub domain_size: usize,
    /// Keep probability of each index.
    #[arg(long, default_value_t = 0.3)]
    pub p: f64,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 3.0)]
    pub u: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerArg {
    Fixed,
    Bernoulli,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ConstantsArgs {
    #[arg(long = "n", value_delimiter = ',', default_values_t = vec![100usize, 1_000, 10_000])]
    pub n_grid: Vec<usize>,
    #[arg(long = "q", value_delimiter = ',', default_values_t = vec![3.0, 3.25, 3.5, 3.75, 4.0])]
    pub q_grid: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 90.0)]
    pub percentile: f64,
    #[arg(long, value_enum, default_value_t = SamplerArg::Fixed)]
    pub sampler: SamplerArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseExperiment {
    /// Deterministic bound for one Gaussian perturbation.
    Perturb,
    /// High-probability bound coverage over many noise draws.
    Gaussian,
    /// Mean squared error of n-fold averages.
    Average,
    /// Ratio deviation of n-fold averages.
    FrAverage,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NoiseArgs {
    #[arg(value_enum)]
    pub experiment: NoiseExperiment,
    /// Clean signal; a spectrum-sparse synthetic one is used when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long = "n", default_value_t = 256)]
    pub domain_size: usize,
    #[arg(long, default_value_t = 5)]
    pub sparsity: usize,
    /// Scale applied to the synthetic signal.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Copy counts for the averaging experiments.
    #[arg(long, value_delimiter = ',', default_values_t = vec![4usize, 16, 64])]
    pub copies: Vec<usize>,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "fshadow",
    version,
    about = "Frame-based classical shadows: POVMs, estimators, variances and simulations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build or load a POVM and report its frame properties.
    Povm(PovmArgs),
    /// Frame spectrum, estimator values and all variance figures.
    Analyze(AnalyzeArgs),
    /// Shot-level simulation of the estimator.
    Simulate(SimulateArgs),
    /// Second-moment operator statistics of qubit/qudit MUBs over dimensions.
    Scan(ScanArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Mub,
    Computational,
    Random,
    AppendixProjective,
    AppendixNonIc,
    AppendixH3,
}

#[derive(Args, Debug, Clone, Serialize)]
#[group(id = "source", required = true, multiple = false)]
pub struct PovmSource {
    /// Built-in POVM family.
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// POVM file, either a bare POVM document or the output of `fshadow povm`.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PovmParams {
    #[command(flatten)]
    pub source: PovmSource,
    /// Dimension for `mub`, `computational` and `random`.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Number of outcomes for `random` (default d^2 + d).
    #[arg(long)]
    pub outcomes: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file. Relative paths are resolved against `FSHADOW_OUT_DIR`
    /// when it is set; without `--out` the result goes to stdout, or to a
    /// default file name inside `FSHADOW_OUT_DIR`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct PovmArgs {
    #[command(flatten)]
    pub povm: PovmParams,
    #[command(flatten)]
    pub common: Common,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DualChoice {
    /// `d F_{I/d}^{-1}(mu_b) / tr(mu_b)`.
    CanonicalEstimator,
    /// `F^{-1}(mu_b)`.
    Canonical,
    /// Minimum-variance dual for the prior.
    MinVariance,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EstimatorParams {
    #[arg(long, value_enum, default_value = "canonical-estimator")]
    pub dual: DualChoice,
    /// Prior for `min-variance`: `pure:k`, `mixed`, `random` or `json:PATH`.
    /// Defaults to the state, or to the maximally mixed state without one.
    #[arg(long)]
    pub prior: Option<String>,
    /// Lower bound applied to prior outcome probabilities for `min-variance`;
    /// without it a zero-probability outcome is an error.
    #[arg(long)]
    pub floor: Option<f64>,
    /// Use the pseudo-inverse for `--dual canonical`, allowing POVMs that are
    /// not informationally complete.
    #[arg(long)]
    pub pseudo: bool,
    /// Observable: `pauli:XZ`, `random`, `proj:k` or `json:PATH`.
    #[arg(long, default_value = "random")]
    pub observable: String,
}

#[derive(Args, Debug, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub povm: PovmParams,
    #[command(flatten)]
    pub estimator: EstimatorParams,
    /// State for the exact variance: `pure:k`, `mixed`, `random` or `json:PATH`.
    #[arg(long)]
    pub state: Option<String>,
    /// Purity for state-averaged figures (defaults to the state's purity, or 1).
    #[arg(long)]
    pub purity: Option<f64>,
    /// Include the dual-frame elements in the output.
    #[arg(long)]
    pub show_dual: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    /// POVM built-in; omit together with `--json` for `--covariant`.
    #[arg(long, value_enum, conflicts_with = "json")]
    pub builtin: Option<Builtin>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub outcomes: Option<usize>,
    /// Haar-random unitary followed by a computational-basis measurement.
    #[arg(long, conflicts_with_all = ["builtin", "json"])]
    pub covariant: bool,
    #[command(flatten)]
    pub estimator: EstimatorParams,
    #[arg(long, default_value = "pure:0")]
    pub state: String,
    /// Shots per run.
    #[arg(long, short = 'n', default_value_t = 1000)]
    pub shots: usize,
    /// Median-of-means group count.
    #[arg(long)]
    pub groups: Option<usize>,
    /// Repeat the N-shot experiment R times and report the sample means.
    #[arg(long)]
    pub realizations: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Histogram CSV of shot values (or sample means with `--realizations`).
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    /// One histogram row per distinct value instead of fixed-width bins.
    #[arg(long)]
    pub pmf: bool,
    /// CSV of the running mean and sample variance against N.
    #[arg(long)]
    pub growth: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Serialize)]
pub struct ScanArgs {
    /// Comma-separated prime dimensions.
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,7,11,13")]
    pub dims: Vec<usize>,
    #[command(flatten)]
    pub common: Common,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "locc-distill",
    version,
    about = "Entropy, distinguishability and hashing-yield reports for Bell-diagonal sources"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Base seed for every random stream.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Shannon entropy of a spectrum, in bits and nats.
    Entropy(SourceArgs),
    /// Typical-string counts and masses over a grid of string lengths.
    Typical(TypicalArgs),
    /// Distinguishable information of a fixed product measurement.
    Di(DiArgs),
    /// Search single-pair product measurements for the largest DI.
    OptimizeDi(OptimizeArgs),
    /// Yield bounds and the distinguishability condition.
    Bounds(BoundsArgs),
    /// Simulate hashing-style identification of likely strings.
    Simulate(SimulateArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Entropy(_) => "entropy",
            Command::Typical(_) => "typical",
            Command::Di(_) => "di",
            Command::OptimizeDi(_) => "optimize-di",
            Command::Bounds(_) => "bounds",
            Command::Simulate(_) => "simulate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Phi+ alone.
    SingleState,
    /// Equal mixture of Phi+, Phi- and Psi+.
    ThreeBellStates,
}

/// Where the source comes from. `--spectrum` is read as Bell-diagonal
/// weights wherever a two-qubit ensemble is needed.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SourceArgs {
    /// Comma-separated weights, e.g. 0.9,0.1,0,0.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["ensemble", "preset"])]
    pub spectrum: Option<Vec<f64>>,

    /// Ensemble JSON file.
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    pub ensemble: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TypicalArgs {
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub spectrum: Vec<f64>,

    #[arg(long, value_delimiter = ',', default_values_t = [10, 100, 1000])]
    pub n: Vec<usize>,

    /// Frequency window; defaults to min(0.05, half the smallest weight).
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Monte Carlo samples when the window holds too many types to sum.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisChoice {
    Computational,
    /// X eigenbasis on both qubits.
    X,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,

    #[arg(long, value_enum, default_value_t = BasisChoice::Computational)]
    pub basis: BasisChoice,

    /// Likelihood above which an outcome indicates a state.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimizeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,

    #[arg(long, default_value_t = 16)]
    pub restarts: usize,

    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdmaxSource {
    /// Best single-pair product measurement found by the optimizer.
    ProductMeasurementOptimizer,
    /// One parity bit per measured pair (Bell-diagonal sources).
    #[value(name = "hashing-class-1bit")]
    #[serde(rename = "hashing-class-1bit")]
    HashingClass1bit,
    /// Value given with --idmax.
    UserSupplied,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub source: SourceArgs,

    #[arg(long, value_enum)]
    pub idmax_source: Option<IdmaxSource>,

    /// Maximal DI in bits, for --idmax-source user-supplied.
    #[arg(long)]
    pub idmax: Option<f64>,

    /// Average DI in bits; defaults to the maximal DI of the chosen class.
    #[arg(long)]
    pub id: Option<f64>,

    /// Restarts for --idmax-source product-measurement-optimizer.
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,

    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,

    /// Report the n-copy four-Bell-state mixture with n copies.
    #[arg(long, value_name = "N")]
    pub multicopy: Option<usize>,

    /// Include the cited relative-entropy upper bound for --multicopy.
    #[arg(long, requires = "multicopy")]
    pub cited_upper_bound: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Four Bell-diagonal weights.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, required = true)]
    pub spectrum: Vec<f64>,

    #[arg(long, value_delimiter = ',', default_values_t = [8])]
    pub n: Vec<usize>,

    /// Measured pairs per run; a comma-separated grid.
    #[arg(long, value_delimiter = ',', required = true)]
    pub rounds: Vec<usize>,

    #[arg(long, default_value_t = 1000)]
    pub trials: usize,

    /// Typical-set window; defaults to the narrowest window below the smallest weight holding 0.99 mass, else the widest.
    #[arg(long)]
    pub epsilon: Option<f64>,

    /// Also write the aggregate summary as JSON here.
    #[arg(long, value_name = "PATH")]
    pub summary: Option<PathBuf>,
}

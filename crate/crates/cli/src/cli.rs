use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hanoiwalk::{EdgeMode, ExceptionalPolicy};
use serde::Serialize;

/// Quantum-walk search on a periodic grid with HN4 long-range edges.
#[derive(Debug, Parser)]
#[command(name = "hanoiwalk", version)]
pub struct Cli {
    /// Worker threads for trials and state updates (defaults to the number of CPUs).
    #[arg(long, global = true, env = "HANOIWALK_WORKERS")]
    pub workers: Option<usize>,

    /// Only print warnings and errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve one walk and write its success-probability trace.
    Simulate(SimulateArgs),
    /// Scan the self-loop weight and record each first peak.
    Sweep(SweepArgs),
    /// First-peak records over lattice sides, target counts and trials.
    Scale(ScaleArgs),
    /// Walks with a fixed fraction of marked vertices.
    Density(DensityArgs),
    /// Fit a runtime model to scaling records.
    Fit(FitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Hn4,
    Grid,
}

impl From<ModeArg> for EdgeMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Hn4 => EdgeMode::Hn4,
            ModeArg::Grid => EdgeMode::GridOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyArg {
    Line,
    Intersection,
}

impl From<PolicyArg> for ExceptionalPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Line => ExceptionalPolicy::Line,
            PolicyArg::Intersection => ExceptionalPolicy::Intersection,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ModelArg {
    #[value(name = "sqrt")]
    #[serde(rename = "sqrt")]
    Sqrt,
    #[value(name = "sqrtlog", alias = "sqrt_log")]
    #[serde(rename = "sqrt_log")]
    SqrtLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum LogBaseArg {
    #[value(name = "e")]
    #[serde(rename = "e")]
    E,
    #[value(name = "10")]
    #[serde(rename = "10")]
    Ten,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
}

/// Where the walk's targets come from.
#[derive(Debug, Clone, Args, Serialize)]
pub struct TargetArgs {
    /// Targets as 0-based "x,y;x,y;...".
    #[arg(long, conflicts_with = "random")]
    pub targets: Option<String>,
    /// Draw this many random admissible targets instead.
    #[arg(long)]
    pub random: Option<usize>,
    /// Seed of the random draw.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Which vertices count as exceptional for random draws and warnings.
    #[arg(long, value_enum, default_value_t = PolicyArg::Line)]
    pub policy: PolicyArg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Lattice side, a power of two.
    #[arg(long)]
    pub side: usize,
    #[command(flatten)]
    pub targets: TargetArgs,
    /// Self-loop weight times N.
    #[arg(long)]
    pub na: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Hn4)]
    pub mode: ModeArg,
    /// Number of steps, or "auto" for the default budget.
    #[arg(long, default_value = "auto")]
    pub steps: String,
    /// Trace CSV path; the manifest is written beside it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub side: usize,
    #[command(flatten)]
    pub targets: TargetArgs,
    #[arg(long)]
    pub na_min: f64,
    #[arg(long)]
    pub na_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub na_step: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Hn4)]
    pub mode: ModeArg,
    /// Step budget per point, or "auto".
    #[arg(long, default_value = "auto")]
    pub steps: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScaleArgs {
    /// Lattice sides, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sides: Vec<usize>,
    /// Number of random targets.
    #[arg(long, conflicts_with_all = ["m_list", "targets"])]
    pub m: Option<usize>,
    /// Several target counts, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "targets")]
    pub m_list: Vec<usize>,
    /// Fixed targets "x,y;..." used on every side instead of random ones.
    #[arg(long)]
    pub targets: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Fixed self-loop weight times N.
    #[arg(long, conflicts_with = "na_rule")]
    pub na: Option<f64>,
    /// "8.5" for a fixed value or "8.5M" to scale with the target count.
    #[arg(long)]
    pub na_rule: Option<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Hn4)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Line)]
    pub policy: PolicyArg,
    /// Draw random targets from the corner window [0, w)^2 only.
    #[arg(long)]
    pub window: Option<usize>,
    /// Large-scale profile: sides 64,128,256,512 and 50 trials unless given.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long, value_delimiter = ',')]
    pub sides: Vec<usize>,
    /// Marked fractions in (0, 1), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub fraction: Vec<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value = "8.5M")]
    pub na_rule: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Line)]
    pub policy: PolicyArg,
    /// Large-scale profile: sides 64..512, fractions 0.1,0.2,0.3 and 50 trials unless given.
    #[arg(long)]
    pub full: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FitArgs {
    /// Scaling records CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Logarithm base of the sqrtlog model.
    #[arg(long, value_enum, default_value_t = LogBaseArg::E)]
    pub log_base: LogBaseArg,
    /// Only fit records with this target count.
    #[arg(long)]
    pub m: Option<usize>,
    /// Only fit records of this edge mode.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Fit JSON path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

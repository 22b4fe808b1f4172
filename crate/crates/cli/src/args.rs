use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use actnoise::coverage::Estimator;
use actnoise::noise::NoiseKind;
use actnoise::schedule::ScheduleKind;
use actnoise::synth::Family;
use actnoise::Execution;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "actnoise", version, about = "Action noise, coverage measures and exploration statistics")]
pub struct Cli {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coverage measures over the synthetic benchmark families.
    Sweep(SweepArgs),
    /// Coverage measures for a CSV of visited states.
    Coverage(CoverageArgs),
    /// Mountain-Car returns of the noise-only policy.
    Calibrate(CalibrateArgs),
    /// Noise samples and composed actions for a zero policy.
    Noise(NoiseArgs),
    /// Statistical tests over a long-format CSV.
    Stats(StatsArgs),
    /// Re-run a command from its manifest.
    Replay(ReplayArgs),
}

/// Output location and execution mode shared by all computing subcommands.
#[derive(Debug, Clone, Args, Default)]
pub struct OutputArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Run on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
}

impl OutputArgs {
    pub fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

/// Neighbour count: `auto` or a positive integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum KChoice {
    #[default]
    Auto,
    Fixed(usize),
}

impl KChoice {
    pub fn get(self) -> Option<usize> {
        match self {
            KChoice::Auto => None,
            KChoice::Fixed(k) => Some(k),
        }
    }
}

impl FromStr for KChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(KChoice::Auto);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(KChoice::Fixed(k)),
            _ => Err(format!("expected 'auto' or a positive integer, got '{s}'")),
        }
    }
}

impl fmt::Display for KChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KChoice::Auto => f.write_str("auto"),
            KChoice::Fixed(k) => write!(f, "{k}"),
        }
    }
}

impl From<KChoice> for String {
    fn from(k: KChoice) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for KChoice {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    GrowingUniform,
    BimodalTruncnorm,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::GrowingUniform => Family::GrowingUniform,
            FamilyArg::BimodalTruncnorm => Family::BimodalTruncnorm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseArg {
    #[value(alias = "gaussian")]
    Gauss,
    #[value(alias = "ornstein-uhlenbeck")]
    Ou,
}

impl NoiseArg {
    pub fn kind(self) -> NoiseKind {
        match self {
            NoiseArg::Gauss => NoiseKind::Gaussian,
            NoiseArg::Ou => NoiseKind::OrnsteinUhlenbeck,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NoiseArg::Gauss => "gauss",
            NoiseArg::Ou => "ou",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchedulerArg {
    Constant,
    Linear,
    Logistic,
}

impl From<SchedulerArg> for ScheduleKind {
    fn from(s: SchedulerArg) -> ScheduleKind {
        match s {
            SchedulerArg::Constant => ScheduleKind::Constant,
            SchedulerArg::Linear => ScheduleKind::Linear,
            SchedulerArg::Logistic => ScheduleKind::Logistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorArg {
    Knn,
    Nnr,
    Both,
}

impl EstimatorArg {
    pub fn estimators(self) -> Vec<Estimator> {
        match self {
            EstimatorArg::Knn => vec![Estimator::Knn],
            EstimatorArg::Nnr => vec![Estimator::Nnr],
            EstimatorArg::Both => vec![Estimator::Knn, Estimator::Nnr],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatsTest {
    Welch,
    Cohend,
    Gameshowell,
    Levene,
    Anova,
    Spearman,
    Standardize,
    Aggregate,
}

impl StatsTest {
    pub fn name(self) -> &'static str {
        match self {
            StatsTest::Welch => "welch",
            StatsTest::Cohend => "cohend",
            StatsTest::Gameshowell => "gameshowell",
            StatsTest::Levene => "levene",
            StatsTest::Anova => "anova",
            StatsTest::Spearman => "spearman",
            StatsTest::Standardize => "standardize",
            StatsTest::Aggregate => "aggregate",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// State dimensionality.
    #[arg(long, default_value_t = 25)]
    pub d: usize,
    /// Points per dataset.
    #[arg(long, default_value_t = 2500)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
    /// Comma-separated scales; defaults to 15 evenly spaced scales in [0.01, 1.5].
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    /// Minimum expected points per bin for X_bin.
    #[arg(long, default_value_t = 10)]
    pub c: usize,
    /// Neighbour count for both X_Urel estimators.
    #[arg(long, default_value = "auto")]
    pub k: KChoice,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CoverageArgs {
    /// States CSV with header s0..s{d-1}.
    #[arg(long)]
    pub input: PathBuf,
    /// Bounds JSON {"low": [...], "high": [...]}; inferred from the states when absent.
    #[arg(long)]
    pub bounds: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    pub c: usize,
    #[arg(long, default_value = "auto")]
    pub k: KChoice,
    #[arg(long, value_enum, default_value = "both")]
    pub estimator: EstimatorArg,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CalibrateArgs {
    #[arg(long = "type", value_enum)]
    pub noise: NoiseArg,
    /// Comma-separated noise scales.
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.5,0.9,1.3,1.7")]
    pub sigma: Vec<f64>,
    #[arg(long, default_value_t = actnoise::noise::DEFAULT_THETA)]
    pub theta: f64,
    #[arg(long, default_value_t = actnoise::noise::DEFAULT_DT)]
    pub dt: f64,
    #[arg(long, default_value_t = 1000)]
    pub episodes: usize,
    /// Restart the noise process at every episode instead of once per rollout block.
    #[arg(long)]
    pub reset_noise_each_episode: bool,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct NoiseArgs {
    #[arg(long = "type", value_enum)]
    pub noise: NoiseArg,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = actnoise::noise::DEFAULT_THETA)]
    pub theta: f64,
    #[arg(long, default_value_t = actnoise::noise::DEFAULT_DT)]
    pub dt: f64,
    #[arg(long, value_enum, default_value = "constant")]
    pub scheduler: SchedulerArg,
    #[arg(long, default_value_t = actnoise::schedule::DEFAULT_STEEPNESS)]
    pub steepness: f64,
    /// Schedule horizon; rows are written for t = 0..=T.
    #[arg(long = "T")]
    pub horizon: usize,
    /// Action dimensionality.
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct StatsArgs {
    #[arg(value_enum)]
    pub test: StatsTest,
    /// Long-format CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Column holding the measurements.
    #[arg(long, default_value = "value")]
    pub value: String,
    /// Grouping column(s), comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub group: Vec<String>,
    /// Factor columns for anova, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub factors: Vec<String>,
    /// First column for spearman.
    #[arg(long)]
    pub x: Option<String>,
    /// Second column for spearman.
    #[arg(long)]
    pub y: Option<String>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest JSON written by an earlier run.
    pub manifest: PathBuf,
    /// Output directory; defaults to the manifest's directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub sequential: bool,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cedesign", version, about = "Channel estimation with designed training data")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// key=value file; explicit flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a training dataset.
    Generate(GenerateArgs),
    /// Train SimpleNet on a dataset.
    Train(TrainArgs),
    /// Monte Carlo MSE/BER curves.
    Eval(EvalArgs),
    /// Mismatch error and applicability of a designed profile.
    Analyze(AnalyzeArgs),
    /// List built-in power delay profiles.
    Registry,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PatternArg {
    Default,
    Alt,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Profile name or file; a comma list makes an equal-weight mixture.
    #[arg(long)]
    pub pdp: String,
    /// Mixture weights, comma separated (default: equal).
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 5.0)]
    pub snr_min: f64,
    #[arg(long, default_value_t = 25.0)]
    pub snr_max: f64,
    #[arg(long, default_value_t = 97.0)]
    pub doppler_max: f64,
    #[arg(long, value_enum, default_value_t = PatternArg::Default)]
    pub pattern: PatternArg,
    /// Training fraction; the rest is validation.
    #[arg(long, default_value_t = 0.95)]
    pub split: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PlacementArg {
    First,
    Last,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.002)]
    pub lr: f64,
    #[arg(long, default_value_t = 20)]
    pub drop_period: usize,
    #[arg(long, default_value_t = 0.5)]
    pub drop_factor: f64,
    #[arg(long, default_value_t = 128)]
    pub batch: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where the bilinear resize sits.
    #[arg(long, value_enum, default_value_t = PlacementArg::First)]
    pub placement: PlacementArg,
    #[arg(long)]
    pub out: PathBuf,
    /// Suppress per-epoch progress.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EstimatorArg {
    Ls,
    Mmse,
    Simplenet,
    Perfect,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub estimator: EstimatorArg,
    /// Model file for `simplenet`.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Design profile for `mmse`.
    #[arg(long)]
    pub design: Option<String>,
    /// Comma list of profiles; `TDL-A`/`TDL-B` with `--ds`.
    #[arg(long)]
    pub channels: String,
    /// `start:step:stop` or a comma list, dB. With `--ds`, the first value.
    #[arg(long, default_value = "0:5:30")]
    pub snr: String,
    /// Delay spreads in ns; switches to a delay-spread sweep.
    #[arg(long)]
    pub ds: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub slots: usize,
    #[arg(long, default_value_t = 97.0)]
    pub doppler_max: f64,
    /// Hold the channel constant over each slot.
    #[arg(long)]
    pub quasi_static: bool,
    /// Average MSE over pilot cells only.
    #[arg(long)]
    pub pilot_only: bool,
    /// Report the SNR gap to perfect CSI at this BER.
    #[arg(long)]
    pub target_ber: Option<f64>,
    #[arg(long, value_enum, default_value_t = PatternArg::Default)]
    pub pattern: PatternArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write `<prefix>_mse.svg` and `<prefix>_ber.svg`.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub design: String,
    /// Comma list of actual profiles.
    #[arg(long)]
    pub actual: String,
    /// Comma list of SNRs in dB.
    #[arg(long, default_value = "10")]
    pub snr: String,
    /// Monte Carlo trials per pair (0 skips verification).
    #[arg(long, default_value_t = 0)]
    pub verify_trials: usize,
    /// Use the trace form that assumes a unit-power actual channel.
    #[arg(long)]
    pub literal: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

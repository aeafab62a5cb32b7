//! `splitsam`: plan, simulate and sweep edge-cloud split inference for
//! promptable segmentation.
//!
//! Exit codes: 0 ok, 2 configuration, 3 schema, 4 infeasible, 5 internal.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

/// Environment variable naming the default fixture directory.
pub const FIXTURES_ENV: &str = "SPLITSAM_FIXTURES";

#[derive(Parser)]
#[command(name = "splitsam", version, about = "Edge-cloud split planner and pipeline simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Min-cut split of one encoder profile at one bandwidth.
    Partition(PartitionArgs),
    /// Resolution and split plan for both encoders under the latency budget.
    Plan(PlanArgs),
    /// Replay one query of a policy over a bandwidth trace.
    Simulate(SimulateArgs),
    /// Policies x network classes x seeds, written as CSV.
    Sweep(SweepArgs),
    /// Offline strategy search and online selection for visual prompts.
    Transform(TransformArgs),
    /// Generate profiles, traces, prompt tasks or the reference fixture set.
    #[command(subcommand)]
    Synth(SynthCommand),
}

/// Bandwidth given either as a number or as a network class mean.
#[derive(Args, Serialize, Clone)]
pub struct BandwidthArgs {
    #[arg(long, conflicts_with = "class")]
    pub bandwidth_mbps: Option<f64>,
    /// wired, 5g, 4g-lte, 802.11g or 3g
    #[arg(long)]
    pub class: Option<String>,
}

#[derive(Args, Serialize)]
pub struct PartitionArgs {
    #[arg(long)]
    pub profile: PathBuf,
    #[command(flatten)]
    pub bandwidth: BandwidthArgs,
    /// Resolution label; defaults to the first one declared.
    #[arg(long)]
    pub resolution: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also enumerate every ancestor-closed split and require equality.
    #[arg(long)]
    pub brute_force_check: bool,
}

/// Where the scenario comes from, plus optional overrides.
#[derive(Args, Serialize, Clone)]
pub struct ScenarioArgs {
    /// Scenario JSON; defaults to `scenario.json` in the fixture directory.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Replaces the image encoder profile.
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Replaces the prompt encoder profile.
    #[arg(long)]
    pub prompt_profile: Option<PathBuf>,
    #[arg(long)]
    pub budget_ms: Option<f64>,
}

/// Bandwidth trace from a CSV file or synthesized for a class.
#[derive(Args, Serialize, Clone)]
pub struct TraceArgs {
    #[arg(long, conflicts_with = "class")]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub class: Option<String>,
    /// Length of a synthesized trace.
    #[arg(long, default_value_t = 120_000.0)]
    pub duration_ms: f64,
    /// Log-normal jitter of a synthesized trace.
    #[arg(long, default_value_t = 0.25)]
    pub sigma: f64,
}

#[derive(Args, Serialize)]
pub struct PlanArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Scalar bandwidth when no trace is given.
    #[arg(long)]
    pub bandwidth_mbps: Option<f64>,
    #[command(flatten)]
    pub trace: TraceArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// samedge, samedge-wot, vanilla, mcs or srs
    #[arg(long, default_value = "samedge")]
    pub policy: String,
    #[command(flatten)]
    pub trace: TraceArgs,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Policies to run; all of them by default.
    #[arg(long, value_delimiter = ',')]
    pub policy: Vec<String>,
    /// Network classes; all five by default.
    #[arg(long, value_delimiter = ',')]
    pub class: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub seed: Vec<u64>,
    #[arg(long, default_value_t = 120_000.0)]
    pub duration_ms: f64,
    #[arg(long, default_value_t = 0.25)]
    pub sigma: f64,
    /// CSV report; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Optional SVG chart of accuracy per class.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct TransformArgs {
    /// Prompt task JSON; defaults to `prompts.json` in the fixture directory.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    /// Number of random strategies to evaluate.
    #[arg(long, default_value_t = 200)]
    pub iterations: usize,
    /// Decoder latency budget.
    #[arg(long)]
    pub budget_ms: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub no_combine: bool,
    #[arg(long)]
    pub no_convert: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum SynthCommand {
    /// Random layer profile.
    Profile(SynthProfileArgs),
    /// Bandwidth trace for a network class, as CSV.
    Trace(SynthTraceArgs),
    /// Random grid task with point prompts.
    Task(SynthTaskArgs),
    /// The reference scenario, profiles and prompt task.
    Fixtures(SynthFixturesArgs),
}

#[derive(Args, Serialize)]
pub struct SynthProfileArgs {
    #[arg(long)]
    pub layers: usize,
    /// chain, diamond or vit-like
    #[arg(long, default_value = "chain")]
    pub shape: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10.0)]
    pub speedup: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct SynthTraceArgs {
    #[arg(long)]
    pub class: String,
    #[arg(long, default_value_t = 120_000.0)]
    pub duration_ms: f64,
    #[arg(long, default_value_t = 0.25)]
    pub sigma: f64,
    #[arg(long, default_value_t = 100.0)]
    pub step_ms: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct SynthTaskArgs {
    #[arg(long, default_value_t = 8)]
    pub grid: usize,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
pub struct SynthFixturesArgs {
    #[arg(long)]
    pub dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Partition(a) => commands::partition(a),
        Command::Plan(a) => commands::plan(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Transform(a) => commands::transform(a),
        Command::Synth(c) => commands::synth(c),
    };
    match result {
        Ok(()) => ExitCode::from(error::code::OK as u8),
        Err(e) => {
            eprintln!("splitsam: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

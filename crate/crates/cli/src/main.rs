//! `camtune` command-line front end.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::error;

use camtune::imaging::Knob;
use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "camtune", version, about = "Camera knob calibration, virtual camera and SARSA tuning")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Flat key/value TOML file.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Map camera parameter values to virtual knob factors.
    Calibrate(CalibrateArgs),
    /// Build the virtual camera and delta tables from a corpus.
    VcBuild(CorpusArgs),
    /// Re-render one frame as if captured at another time.
    VcRender(VcRenderArgs),
    /// Rank every grid config for one frame by detection quality.
    Sweep(SweepArgs),
    /// Train the agent on a corpus.
    Tune(TuneArgs),
    /// Fixed-knob baseline against the tuned pipeline over a simulated day.
    AbEval(AbEvalArgs),
    /// Write a synthetic day scene with ground truth.
    GenScene(GenSceneArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CameraKind {
    Synthetic,
    Http,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum HiddenKind {
    Linear,
    Convex,
    Concave,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    #[arg(long, value_enum, default_value = "synthetic")]
    camera: CameraKind,
    /// Hidden parameter map of the synthetic camera.
    #[arg(long, value_enum, default_value = "linear")]
    hidden: HiddenKind,
    /// Calibrate one knob only.
    #[arg(long)]
    knob: Option<Knob>,
    /// Scene image for the synthetic camera.
    #[arg(long, value_name = "IMAGE")]
    base: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CorpusArgs {
    #[arg(long, value_name = "DIR")]
    corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long, value_name = "FILE")]
    vc: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    delta: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VcRenderArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    tables: TableArgs,
    /// Capture time of the source frame (HH:MM).
    #[arg(long)]
    t1: String,
    /// Target time (HH:MM).
    #[arg(long)]
    t2: String,
    /// Sequence number of the source frame within its interval.
    #[arg(long, default_value_t = 0)]
    seq: u32,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Frame id; defaults to the first frame.
    #[arg(long)]
    frame: Option<String>,
    /// `coarse`, `fine` or a step size.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
struct AgentArgs {
    /// `oracle`, `proxy` or `external`.
    #[arg(long)]
    estimator: Option<String>,
    /// `revert-greedy` or `noop`.
    #[arg(long)]
    policy: Option<String>,
    /// Training passes before the final one.
    #[arg(long)]
    passes: Option<usize>,
}

#[derive(Debug, Args)]
struct TuneArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    agent: AgentArgs,
    /// Q-table to continue from.
    #[arg(long, value_name = "FILE")]
    qtable: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AbEvalArgs {
    /// Corpus directory; the built-in tiny scene when absent.
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    tables: TableArgs,
    #[command(flatten)]
    agent: AgentArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Tiny,
    FullDay,
}

#[derive(Debug, Args)]
struct GenSceneArgs {
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long)]
    frames_per_interval: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.common.verbose {
        0 => "info",
        1 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            e.exit_code()
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ctx = commands::Context::new(file, cli.common.seed, cli.common.out)?;
    match cli.command {
        Command::Calibrate(a) => commands::calibrate(&ctx, a),
        Command::VcBuild(a) => commands::vc_build(&ctx, a),
        Command::VcRender(a) => commands::vc_render(&ctx, a),
        Command::Sweep(a) => commands::sweep(&ctx, a),
        Command::Tune(a) => commands::tune(&ctx, a),
        Command::AbEval(a) => commands::ab_eval(&ctx, a),
        Command::GenScene(a) => commands::gen_scene(&ctx, a),
    }
}

//! The `monty` command line: argument parsing, dispatch and exit codes.
//!
//! Every command builds a serializable report and prints it as an aligned
//! table, CSV or JSON. Commands that consume randomness resolve their seed
//! before running so a [`record::RunRecord`] can replay them exactly.

pub mod commands;
pub mod play;
pub mod record;
pub mod render;

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use threedoors::model::{FinalPolicy, DEFAULT_ENUMERATION_CAP};
use threedoors::solver::DEFAULT_TOLERANCE;

pub use render::Format;

pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// A replayed run produced different output.
    pub const MISMATCH: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const UNREACHABLE: i32 = 3;
    pub const SOLVER: i32 = 4;
    pub const FLAGGED: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(name = "monty", version, about = "Exact analysis, minimax solving and simulation of the three-doors game")]
pub struct Cli {
    /// Output format
    #[arg(long, value_enum, global = true, default_value_t = Format::Table)]
    pub format: Format,

    /// Also write a replayable run record to FILE
    #[arg(long, global = true, value_name = "FILE")]
    pub record: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Exact win probabilities, conditionals and posteriors
    Analyze(AnalyzeArgs),
    /// Enumerate pure strategies and solve the matrix game
    Solve(SolveArgs),
    /// Monte Carlo estimate checked against the exact values
    Simulate(SimulateArgs),
    /// Conditional win probabilities over a grid of host biases
    Sweep(SweepArgs),
    /// Play the classic game at the terminal
    Play(PlayArgs),
    /// List the built-in models
    Presets,
    /// Re-run a recorded command and compare outputs
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Solve(_) => "solve",
            Command::Simulate(_) => "simulate",
            Command::Sweep(_) => "sweep",
            Command::Play(_) => "play",
            Command::Presets => "presets",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyArg {
    Switch,
    Stay,
    Uniform,
}

impl From<PolicyArg> for FinalPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Switch => FinalPolicy::Switch,
            PolicyArg::Stay => FinalPolicy::Stay,
            PolicyArg::Uniform => FinalPolicy::Uniform,
        }
    }
}

/// Where the model comes from. Without `--preset` or `--model` the classic
/// game is used.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct ModelArgs {
    /// Built-in model (see `monty presets`)
    #[arg(long, conflicts_with = "model")]
    pub preset: Option<String>,

    /// Host bias for host-biased
    #[arg(long, conflicts_with = "model")]
    pub q: Option<f64>,

    /// Door count for hundred-doors
    #[arg(long, conflicts_with = "model")]
    pub doors: Option<usize>,

    /// JSON model file
    #[arg(long, value_name = "FILE")]
    pub model: Option<PathBuf>,

    /// Replace the player's final-choice rule
    #[arg(long, value_enum)]
    pub policy: Option<PolicyArg>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Condition on an observation, e.g. p=1,O=3 or p=2,O=1+4
    #[arg(long, value_name = "OBS")]
    pub observe: Option<String>,

    /// Conditional win probability for every reachable observation
    #[arg(long)]
    pub all_observations: bool,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    /// Number of doors
    #[arg(long, default_value_t = 3)]
    pub doors: usize,

    /// Doors the host opens
    #[arg(long, default_value_t = 1)]
    pub open: usize,

    /// Largest accepted duality gap
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    pub tol: f64,

    /// Most pure strategies enumerated per side
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: u64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Number of plays
    #[arg(short = 'n', long = "plays", value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,

    /// Seed; falls back to MONTY_SEED, then to a fresh random seed
    #[arg(long, env = "MONTY_SEED")]
    pub seed: Option<u64>,

    /// Independent generator streams run in parallel
    #[arg(long, default_value_t = 1, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..=1024))]
    pub shards: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 0.0)]
    pub q_from: f64,

    #[arg(long, default_value_t = 1.0)]
    pub q_to: f64,

    /// Grid points, endpoints included
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct PlayArgs {
    /// Seed; falls back to MONTY_SEED, then to a fresh random seed
    #[arg(long, env = "MONTY_SEED")]
    pub seed: Option<u64>,

    /// Host opens the higher door with probability q when it has a choice
    #[arg(long, value_name = "Q")]
    pub host_bias: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Run record written by --record
    pub file: PathBuf,
}

/// A failed command: message for stderr and the process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: exit::USAGE, message: message.into() }
    }
}

impl From<threedoors::Error> for Failure {
    fn from(e: threedoors::Error) -> Self {
        use threedoors::Error;
        let code = match e {
            Error::Unreachable(_) => exit::UNREACHABLE,
            Error::CapExceeded { .. } | Error::NonConvergence { .. } => exit::SOLVER,
            _ => exit::USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return e.exit_code();
        }
    };
    match dispatch(cli, input, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let Cli { format, record, command } = cli;
    if let Command::Play(args) = command {
        if record.is_some() {
            return Err(Failure::usage("interactive sessions cannot be recorded"));
        }
        let prompts: &mut dyn Write = if format == Format::Table { &mut *out } else { &mut *err };
        let summary = play::cmd_play(&args, input, prompts)?;
        emit(&commands::Rendered::from_report(&summary)?, format, out)?;
        return Ok(exit::SUCCESS);
    }
    if record.is_some() && matches!(command, Command::Replay(_)) {
        return Err(Failure::usage("replay runs cannot themselves be recorded"));
    }

    let started_at = record::now();
    let command = commands::resolve(command);
    let rendered = commands::execute(&command)?;
    if let Some(path) = record {
        record::RunRecord::new(command, &rendered, started_at).save(&path)?;
    }
    emit(&rendered, format, out)?;
    Ok(rendered.code)
}

fn emit(rendered: &commands::Rendered, format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    let text = match format {
        Format::Table => rendered.table.clone(),
        Format::Csv => rendered.csv.to_string().map_err(|e| Failure::usage(e.to_string()))?,
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rendered.json).map_err(|e| Failure::usage(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    out.write_all(text.as_bytes())?;
    Ok(())
}

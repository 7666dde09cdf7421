//! `gaussrelax` command-line front end.
//!
//! Exit codes: 0 success, 2 invalid or unphysical input, 3 wrong direction,
//! budget or infeasible target, 4 numerical non-convergence.

mod args;
mod commands;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use gaussrelax::Error;

use args::{ChannelArgs, Format, IntegratorArgs, StateArgs, TargetArgs};

#[derive(Parser, Debug)]
#[command(name = "gaussrelax", version, about = "Time-optimal relaxation of a one-mode Gaussian state")]
struct Cli {
    /// Append a metadata block with wall-clock time.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fixed point of a channel.
    FixedPoint {
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// State after free evolution for a given time.
    Evolve {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        /// Evolution time.
        #[arg(long)]
        t: f64,
        #[arg(long, value_enum, default_value_t = Source::Closed)]
        source: Source,
        #[command(flatten)]
        integrator: IntegratorArgs,
    },
    /// Sampled free trajectory, or one of its parametric curves.
    Trajectory {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        t_max: f64,
        /// Number of samples, endpoints included.
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, value_enum, default_value_t = TrajSource::Closed)]
        source: TrajSource,
        #[arg(long, value_enum)]
        curve: Option<Curve>,
        /// Output file; with `--source both`, the prefix of the two files.
        #[arg(long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        integrator: IntegratorArgs,
    },
    /// Relaxation times.
    Time {
        #[arg(value_enum)]
        kind: TimeKind,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        target: TargetArgs,
    },
    /// Plan a control protocol or replay one.
    Protocol {
        #[command(subcommand)]
        action: ProtocolAction,
    },
    /// Purities held fixed by a pinned shape.
    StopSet {
        /// Purity to hold.
        #[arg(long)]
        mu: f64,
        #[command(flatten)]
        channel: ChannelArgs,
        /// Number of phases in the sampled table.
        #[arg(long, default_value_t = 36)]
        samples: usize,
    },
    /// Longest free and controlled relaxation times and their ratio.
    /// The channel defaults to the thermal fixed point mu_fp = 0.5.
    WorstCase {
        #[arg(long, allow_hyphen_values = true)]
        r0: f64,
        /// Ratio mu0/mu_fp.
        #[arg(long)]
        mu_ratio: f64,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        #[command(flatten)]
        channel: ChannelArgs,
    },
    /// Relaxation times over a one-parameter grid, evaluated in parallel.
    Sweep {
        #[arg(value_enum)]
        kind: TimeKind,
        #[arg(long, value_enum)]
        vary: SweepVar,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        /// Number of grid points, endpoints included.
        #[arg(long, default_value_t = 11)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        target: TargetArgs,
    },
}

#[derive(Subcommand, Debug)]
enum ProtocolAction {
    /// Emit a protocol document.
    Plan {
        #[arg(value_enum)]
        direction: Direction,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Replay a protocol document with the oracle integrator.
    Simulate {
        /// Protocol document; `-` reads standard input.
        #[arg(long)]
        protocol: PathBuf,
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        integrator: IntegratorArgs,
        /// Write the replay trace as CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Source {
    Closed,
    Oracle,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TrajSource {
    Closed,
    Oracle,
    Both,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Curve {
    MuOfR,
    ThetaParam,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TimeKind {
    Free,
    Cool,
    Heat,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Cool,
    Heat,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SweepVar {
    Mu0,
    R0,
    Theta0,
    Epsilon,
    RMax,
    MuFp,
    RFp,
    ThetaFp,
}

#[derive(Debug)]
enum CliError {
    Core(Error),
    Io(String),
    Parse(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Parse(_) => 2,
            CliError::Core(e) => match e {
                Error::WrongDirection(_) | Error::BudgetTooSmall(_) | Error::Infeasible(_) => 3,
                Error::NotConverged(_) | Error::StepLimitExceeded { .. } => 4,
                _ => 2,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Parse(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match commands::run(cli.command) {
        Ok(mut out) => {
            if cli.timing {
                commands::attach_timing(&mut out, start.elapsed().as_secs_f64());
            }
            match out.emit() {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

//! `netabc` command-line front end.
//!
//! Every subcommand writes its CSV outputs plus `<command>.run.toml`, a
//! sidecar holding the fully resolved configuration. Passing that sidecar
//! back with `--config` reproduces the run bit for bit.
//!
//! Exit status: 0 success, 2 usage error, 3 invalid configuration,
//! 4 I/O failure, 1 any other failure.

mod commands;
mod options;

use std::ffi::OsString;
use std::fmt;

use clap::{Parser, Subcommand};

pub use options::Options;

/// Environment variable supplying the default output directory.
pub const OUT_DIR_ENV: &str = "NETABC_OUT";

#[derive(Debug, Parser)]
#[command(name = "netabc", version, about = "Partnership network simulation and ABC inference")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Simulate one trajectory and export its edges.
    Simulate(Options),
    /// Compute wave summaries from a stored trajectory.
    Summarize(Options),
    /// Build a reference table from prior draws.
    Reftable(Options),
    /// Rejection ABC (with optional regression adjustment) against a reference table.
    Infer(Options),
    /// Posterior RMSE as a function of the lag between waves.
    LagSweep(Options),
    /// Summary medians over a grid of one parameter.
    Mapping(Options),
    /// Loess fit with pointwise 95% intervals.
    Loess(Options),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Summarize(_) => "summarize",
            Command::Reftable(_) => "reftable",
            Command::Infer(_) => "infer",
            Command::LagSweep(_) => "lag-sweep",
            Command::Mapping(_) => "mapping",
            Command::Loess(_) => "loess",
        }
    }

    fn options(&self) -> &Options {
        match self {
            Command::Simulate(o)
            | Command::Summarize(o)
            | Command::Reftable(o)
            | Command::Infer(o)
            | Command::LagSweep(o)
            | Command::Mapping(o)
            | Command::Loess(o) => o,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Io(_) => 4,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Failed(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        use crate::Error as E;
        match e {
            E::Io(e) => CliError::Io(e.to_string()),
            E::Csv(e) if e.is_io_error() => CliError::Io(e.to_string()),
            E::InvalidParam(_)
            | E::PopulationTooSmall(_)
            | E::OutsideRecordedSpan { .. }
            | E::DesignMismatch { .. }
            | E::TooFewAccepted { .. } => CliError::Config(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parses `argv` and runs the command, returning the process exit status.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("netabc {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

/// Resolves configuration layers and runs one command.
pub fn execute(command: &Command) -> Result<(), CliError> {
    let flags = command.options().clone();
    let file = match &flags.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Options::from_toml(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => Options::default(),
    };
    let opts = flags.or(file);
    let threads = match opts.threads {
        Some(0) => return Err(CliError::Config("threads must be at least 1".into())),
        Some(t) => t,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Failed(e.to_string()))?;
    pool.install(|| commands::dispatch(command.name(), opts))
}

//! Command-line harness for the qpkid simulator.
//!
//! Each command returns a [`Report`]: the primary artifact (written to `--out`
//! or standard output), an optional summary for standard error, and the exit
//! status.

pub mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use qpkid_core::Error as CoreError;

pub use config::{Command, Format, RunConfig};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Core(CoreError::InvalidParams(_)) => exit::INVALID_CONFIG,
            CliError::Core(CoreError::UsageExhausted { .. }) => exit::REFUSAL,
            CliError::Core(_) | CliError::Io(_) => exit::NUMERICAL,
        }
    }
}

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const REJECT: i32 = 2;
    pub const REFUSAL: i32 = 3;
    pub const INVALID_CONFIG: i32 = 4;
    pub const NUMERICAL: i32 = 5;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    Reject,
    Refusal,
    /// A self-check failed.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => exit::SUCCESS,
            Status::Reject => exit::REJECT,
            Status::Refusal => exit::REFUSAL,
            Status::Failed => exit::NUMERICAL,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub output: String,
    pub summary: Option<String>,
    pub status: Status,
}

impl Report {
    pub fn ok(output: String) -> Self {
        Report { output, summary: None, status: Status::Success }
    }
}

pub fn execute(config: &RunConfig) -> Result<Report, CliError> {
    match config.command {
        Command::Keygen => commands::keygen(config),
        Command::RunHonest => commands::run_honest(config),
        Command::RunAttack => commands::run_attack(config),
        Command::PsuccTable => commands::psucc_table(config),
        Command::Bounds => commands::bounds(config),
        Command::VerifyIdentities => commands::verify_identities(config),
    }
}

/// Parses `args`, runs the command, writes its output and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(config) => config,
        Err(e) => {
            let code = if e.use_stderr() { exit::INVALID_CONFIG } else { exit::SUCCESS };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    match execute(&config).and_then(|report| emit(&config, report, stdout, stderr)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit(config: &RunConfig, report: Report, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    match &config.output_path {
        Some(path) => std::fs::write(path, &report.output).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
        None => stdout.write_all(report.output.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?,
    }
    if let Some(summary) = &report.summary {
        stderr.write_all(summary.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(report.status.exit_code())
}

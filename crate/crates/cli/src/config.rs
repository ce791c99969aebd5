use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use qpkid_core::keys::Variant;
use qpkid_core::protocol::Mode;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Standard,
    Hardened,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Hardened => Variant::Hardened,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Sampled,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Sampled => Mode::Sampled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Generate a private key file (and optionally its public description).
    Keygen,
    /// Run honest sessions and write their transcripts.
    RunHonest,
    /// Evaluate the optimal impostor round for t copies (or t = 1..=t-max).
    RunAttack,
    /// Tabulate the guessing-probability formula, its trace-norm oracle and Cheung's bound.
    PsuccTable,
    /// Break-probability bound, union-bound chain or security-parameter advisor.
    Bounds,
    /// Check the algebraic identities the protocol relies on.
    VerifyIdentities,
}

/// Parsed command line.
#[derive(Debug, Clone, Parser)]
#[command(name = "qpkid", version, about = "Quantum-public-key identification simulator")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Reusability parameter r.
    #[arg(long, global = true)]
    pub r: Option<u64>,

    /// Security parameter s (kernel rounds per session).
    #[arg(long, global = true)]
    pub s: Option<u64>,

    /// Public-key copies held by the impostor.
    #[arg(long, global = true)]
    pub t: Option<u64>,

    /// Sweep t = 1..=t-max.
    #[arg(long = "t-max", global = true)]
    pub t_max: Option<u64>,

    #[arg(long, global = true, value_enum, default_value = "standard")]
    pub variant: VariantArg,

    #[arg(long, global = true, value_enum, default_value = "exact")]
    pub mode: ModeArg,

    /// Independent trials (fresh key per trial for run-honest).
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Sessions run under each key in run-honest.
    #[arg(long, global = true, default_value_t = 1)]
    pub sessions: u64,

    /// Master seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Target break probability for the security-parameter advisor.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,

    /// Existing private key file for run-honest.
    #[arg(long, global = true)]
    pub key: Option<PathBuf>,

    /// Also write the public description of a generated key here.
    #[arg(long = "public-out", global = true)]
    pub public_out: Option<PathBuf>,

    /// Include the phases in the public description (debugging only).
    #[arg(long = "expose-phases", global = true)]
    pub expose_phases: bool,

    /// Output file; standard output when absent.
    #[arg(long = "out", global = true)]
    pub output_path: Option<PathBuf>,

    #[arg(long = "format", global = true, value_enum)]
    pub output_format: Option<Format>,
}

impl RunConfig {
    pub fn variant(&self) -> Variant {
        self.variant.into()
    }

    pub fn mode(&self) -> Mode {
        self.mode.into()
    }

    pub fn require_r(&self) -> Result<u64, CliError> {
        positive("--r", self.r)
    }

    pub fn require_s(&self) -> Result<u64, CliError> {
        positive("--s", self.s)
    }

    /// Seed for commands that always draw randomness.
    pub fn require_seed(&self) -> Result<u64, CliError> {
        self.seed.ok_or_else(|| CliError::Config("--seed is required for this command".into()))
    }

    /// Seed for commands that only draw randomness in sampled mode.
    pub fn seed_for_mode(&self) -> Result<u64, CliError> {
        match (self.mode(), self.seed) {
            (_, Some(seed)) => Ok(seed),
            (Mode::Exact, None) => Ok(0),
            (Mode::Sampled, None) => Err(CliError::Config("sampled mode needs --seed".into())),
        }
    }

    /// The requested t values: `--t`, or `1..=t-max`.
    pub fn t_values(&self, default_max: u64) -> Result<Vec<u64>, CliError> {
        match (self.t, self.t_max) {
            (Some(_), Some(_)) => Err(CliError::Config("give either --t or --t-max, not both".into())),
            (Some(t), None) => Ok(vec![t]),
            (None, Some(0)) => Err(CliError::Config("--t-max must be at least 1".into())),
            (None, Some(max)) => Ok((1..=max).collect()),
            (None, None) => Ok((1..=default_max).collect()),
        }
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.output_format.unwrap_or(default)
    }
}

fn positive(flag: &str, value: Option<u64>) -> Result<u64, CliError> {
    match value {
        Some(0) => Err(CliError::Config(format!("{flag} must be at least 1"))),
        Some(v) => Ok(v),
        None => Err(CliError::Config(format!("{flag} is required for this command"))),
    }
}

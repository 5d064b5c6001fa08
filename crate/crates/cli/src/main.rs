//! `tailwave <mode> --config <path> [--out <dir>] [--threads k]`
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical abort,
//! 3 verification failure.

mod modes;
mod output;

use clap::{Parser, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// single run: diagnostics CSV, snapshots and a JSON summary
    Evolve,
    /// acceptance scenarios; exit 0 iff every check passes
    Verify,
    /// grid over (amplitude, N, form), one summary per cell
    Sweep,
    /// decompose a null form over the generator families
    Classify,
    /// self-tests of the independent oracles
    OracleCheck,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Evolve => "evolve",
            Mode::Verify => "verify",
            Mode::Sweep => "sweep",
            Mode::Classify => "classify",
            Mode::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "tailwave", version, about = "Late-time tails of radial null-form wave equations")]
pub struct Cli {
    pub mode: Mode,
    /// JSON configuration (run config; sweep/verify/classify specs)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// output directory
    #[arg(long, default_value = "tailwave-out")]
    pub out: PathBuf,
    /// worker threads
    #[arg(long, env = "TAILWAVE_THREADS")]
    pub threads: Option<usize>,
    /// scenario for `verify` (repeatable; `all` runs every scenario)
    #[arg(long)]
    pub scenario: Vec<String>,
    /// preset for `classify`
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Abort(String),
    Verification(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Abort(_) => 2,
            CliError::Verification(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Abort(m) => write!(f, "numerical abort: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<tailwave_core::Error> for CliError {
    fn from(e: tailwave_core::Error) -> Self {
        if e.is_numerical_abort() {
            CliError::Abort(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("tailwave: cannot configure {k} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.mode {
        Mode::Evolve => modes::evolve(&cli),
        Mode::Verify => modes::verify(&cli),
        Mode::Sweep => modes::sweep(&cli),
        Mode::Classify => modes::classify(&cli),
        Mode::OracleCheck => modes::oracle_check(&cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tailwave: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

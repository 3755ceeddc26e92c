//! `tandem`: transient probabilities, relaxation times and oracle checks for
//! series Jackson networks.

mod commands;
mod output;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;
use tandem_core::Error;

#[derive(Parser, Debug)]
#[command(name = "tandem", version, about = "Transient analysis of tandem Jackson networks")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Worker threads for internal parallelism (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Arithmetic for the analytic paths.
    #[arg(long, global = true, value_enum, env = "TANDEM_PRECISION", default_value = "double")]
    pub precision: Precision,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    Double,
    High,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// k_t(0,0) from the permutation sums.
    Kt00(Kt00Args),
    /// k_t(q, q') with dispatch by rate pattern.
    Kt(KtArgs),
    /// Relaxation time, dominant term and optional decay fit.
    Relaxation(RelaxationArgs),
    /// Run the invariant suites.
    Verify(VerifyArgs),
    /// Monte Carlo estimates.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug)]
pub struct Kt00Args {
    /// Comma-separated rates ν₀,ν₁,…,ν_N (arrival rate first).
    #[arg(long)]
    pub rates: String,
    /// Times: a list `1,2,5` or a range `start:stop:step`.
    #[arg(long = "t", default_value = "1")]
    pub t: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub method: Kt00Method,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kt00Method {
    Auto,
    Thm31,
    Thm32,
}

#[derive(Args, Debug)]
pub struct KtArgs {
    #[arg(long)]
    pub rates: String,
    /// Start queue lengths q₁,…,q_N.
    #[arg(long)]
    pub q: String,
    /// Target queue lengths.
    #[arg(long)]
    pub q2: String,
    #[arg(long = "t", default_value = "1")]
    pub t: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct RelaxationArgs {
    #[arg(long)]
    pub rates: String,
    /// Optional time grid for a decay fit.
    #[arg(long = "t")]
    pub t: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Values below this are excluded from the fit.
    #[arg(long)]
    pub floor: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Oracles,
    Asymptotics,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Budget {
    Fast,
    Full,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long, value_enum, default_value = "fast")]
    pub budget: Budget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SimTarget {
    Kt,
    Noncross,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub target: SimTarget,
    #[arg(long)]
    pub rates: String,
    #[arg(long = "t")]
    pub t: f64,
    /// Start queue lengths (target `kt`).
    #[arg(long)]
    pub q: Option<String>,
    /// Target queue lengths (target `kt`).
    #[arg(long)]
    pub q2: Option<String>,
    /// Start point x₀ ≥ … ≥ x_N (target `noncross`; default the origin).
    #[arg(long)]
    pub x: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
}

/// Failure of a command, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Tolerance(String),
    Verification(String),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ToleranceUnachievable { .. } => Failure::Tolerance(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let mut out = std::io::stdout().lock();
    match commands::run(&cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Tolerance(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(4)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

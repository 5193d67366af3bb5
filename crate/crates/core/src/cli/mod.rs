//! The `qwhittaker` command line.
//!
//! Every subcommand writes one JSON report (or JSON lines / CSV where noted)
//! to stdout. Exit status is 0 when all checks pass, 1 when a check fails and
//! 2 for usage, input or resource errors.

mod commands;
mod params;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

pub use params::{activity_strings, parse_params, Mode, Params};

use crate::enumeration::{CAP_ENV_VAR, DEFAULT_CANDIDATE_CAP};
use crate::error::Error;

pub const REPORT_SCHEMA: &str = "qwhittaker.report/1";

#[derive(Debug, Parser)]
#[command(name = "qwhittaker", version, about = "Periodized q-Whittaker dynamics on the discrete torus")]
pub struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Refuse enumeration when C(L, m1)^N exceeds this bound.
    #[arg(long, global = true, env = CAP_ENV_VAR, default_value_t = DEFAULT_CANDIDATE_CAP)]
    pub max_candidates: u128,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct TorusArgs {
    #[arg(long = "L")]
    pub l: u32,
    #[arg(long = "N")]
    pub n: u32,
    #[arg(long)]
    pub m1: u32,
}

#[derive(Debug, Args, Clone)]
pub struct SectorArgs {
    #[command(flatten)]
    pub torus: TorusArgs,
    #[arg(long)]
    pub m2: u32,
}

#[derive(Debug, Args, Clone)]
pub struct ParamArgs {
    /// Deformation parameter: `p/r` for exact arithmetic, a decimal for floats.
    #[arg(long)]
    pub q: String,
    /// Row activities `a1,...,aN` (default all 1).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Force the arithmetic; exact inputs may run in float, not the reverse.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List configurations as JSON lines, or count them per sector.
    Enumerate {
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long)]
        m2: Option<u32>,
        #[arg(long)]
        count_only: bool,
    },
    /// Run one of the verification checks.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Simulate the continuous-time dynamics.
    Simulate {
        #[command(flatten)]
        sector: SectorArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        t_max: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Initial configuration as JSON (default: the canonical state).
        #[arg(long)]
        init: Option<PathBuf>,
        /// Write the event log as CSV.
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        max_events: Option<u64>,
    },
    /// Single-particle moves from one configuration to another.
    Connect {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
    },
    /// Derived quantities of a torus or sector.
    Info {
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long)]
        m2: Option<u32>,
    },
    /// Gibbs weights and probabilities of a sector as CSV.
    Measure {
        #[command(flatten)]
        sector: SectorArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Check that the Gibbs measure annihilates the generator.
    Stationarity {
        #[command(flatten)]
        sector: SectorArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Negative control: double the weight of state INDEX before checking.
        #[arg(long, value_name = "INDEX")]
        perturb: Option<usize>,
    },
    /// Check the derivative-term cancellations on random exact samples.
    Identity {
        /// Comma list of exact q values.
        #[arg(long, default_value = "1/7,1/3,1/2,9/10")]
        q: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 12)]
        max_int: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also prove the identity for every q on the first K samples.
        #[arg(long, value_name = "K", default_value_t = 0)]
        certify: usize,
    },
    /// Check the per-particle balance on every state and particle.
    Balance {
        #[command(flatten)]
        sector: SectorArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Check strong connectivity and build explicit connecting paths.
    Ergodicity {
        #[command(flatten)]
        sector: SectorArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Whether the checks of a run passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

/// Errors that signal a broken invariant rather than bad input.
fn is_verification_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Consistency(_) | Error::SectorViolation(_) | Error::FrozenState | Error::ContractViolation(_)
    )
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match commands::run(&cli, &mut out) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if is_verification_error(&e) { 1 } else { 2 })
        }
    }
}

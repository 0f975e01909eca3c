//! The `voros` command line.
//!
//! Exit codes are a stable contract: 0 pass, 1 tolerance failure,
//! 2 non-convergence, 3 partial result, 64 usage, 65 domain, 66 malformed
//! input, 70 numeric failure.

mod commands;
pub mod files;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

use crate::error::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_TOLERANCE: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DOMAIN: i32 = 65;
pub const EXIT_MALFORMED: i32 = 66;
pub const EXIT_NUMERIC: i32 = 70;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Domain(String),
    Malformed(String),
    Numeric(String),
    /// An output file could not be written. The path came from the command
    /// line, so this is reported as a usage error.
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Output(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Malformed(_) => EXIT_MALFORMED,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(m) => write!(f, "domain error: {m}"),
            CliError::Malformed(m) => write!(f, "malformed input: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
            CliError::Output(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation { .. } | Error::Domain(_) => CliError::Domain(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "voros", version, about = "Exact quantization, Stokes functions and an ODE oracle")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Right-hand side `pi (k - 1/2)`.
    Voros,
    /// Right-hand side shifted by `alpha / 2`, matching the ODE determinant.
    Ode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum What {
    /// PT eigenvalues for the chosen ell.
    Spectrum,
    /// Dirichlet levels on the half line.
    Halfline,
    #[value(name = "C0")]
    C0,
    #[value(name = "D0")]
    D0,
    /// Normalized spectral determinant.
    F,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the quantization scheme and write a spectrum file.
    #[command(group(ArgGroup::new("angle").required(true).args(["m", "alpha"])))]
    Quantize {
        #[arg(long)]
        m: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 64)]
        levels: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 200)]
        max_iter: usize,
        #[arg(long, value_enum, default_value_t = Mode::Voros)]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the zero clauses, the functional identities and the witness on a spectrum file.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Search radius for zeros of C and D; defaults to about E_{N/2}.
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Values from the ODE shooting oracle.
    #[command(group(ArgGroup::new("target").required(true).args(["count", "lambda"])))]
    Oracle {
        #[arg(long)]
        m: f64,
        #[arg(long, default_value_t = 1)]
        ell: u8,
        #[arg(long)]
        count: Option<usize>,
        /// `re` or `re,im`.
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<String>,
        #[arg(long, value_enum)]
        what: What,
        /// Read and print the internal variable `s = -lambda`.
        #[arg(long)]
        internal: bool,
    },
    /// Compare a spectrum file with the oracle.
    Crosscheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        m: f64,
        #[arg(long, default_value_t = 8)]
        count: usize,
        #[arg(long, default_value_t = 1e-5)]
        rtol: f64,
    },
    /// Locate the zeros and 1-points of the witness and check which rays they lie on.
    Theorem1 {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        /// Aim for about this many zeros; sets the search radius.
        #[arg(long, default_value_t = 10)]
        points: usize,
        /// Search radius; overrides --points.
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long = "out-csv")]
        out_csv: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let command_line = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::dispatch(cli.command, command_line) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("voros: {e}");
            e.exit_code()
        }
    }
}

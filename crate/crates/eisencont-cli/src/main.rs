//! `eisencont` command-line front end.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage or precondition error.

mod commands;
mod config;
mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{Overrides, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "eisencont", version, about = "Eisenstein series, scattering coefficient and continuation engine")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true, env = "EISEN_CONFIG")]
    config: Option<PathBuf>,
    /// Fail on any row that is not `ok` instead of reporting it.
    #[arg(long, global = true)]
    strict: bool,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Truncated series E(z; s) with its tail bound (Re s > 1).
    Eval {
        /// Point as `x,y`.
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Complex parameter, e.g. `2`, `3+1i`.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        /// Truncation `max(|m|, |n|) <= M`.
        #[arg(long = "M", default_value_t = 500)]
        m: u32,
    },
    /// Continued scattering coefficient over a list or a rectangle of s values, as CSV.
    Mscan {
        /// Comma-separated complex values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Vec<String>,
        /// Real range `from,to,count`.
        #[arg(long, allow_hyphen_values = true)]
        re: Option<String>,
        /// Imaginary range `from,to,count` (default `0,0,1`).
        #[arg(long, allow_hyphen_values = true)]
        im: Option<String>,
    },
    /// Root data and Weyl double cosets for compositions of n.
    Weyl {
        #[arg(long)]
        n: usize,
        /// Composition such as `2,1`.
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: Option<String>,
        #[arg(long, value_enum, default_value_t = Query::Cosets)]
        query: Query,
    },
    /// Packaged toy families through the numeric and exact engines.
    EngineDemo {
        #[arg(value_enum)]
        case: Case,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Query {
    Cosets,
    Omega,
    OmegaSemi,
    DeltaP,
    SimpleRoots,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Case {
    Rank1,
    Twobytwo,
    Rational3,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(cli.config.as_deref(), &cli.overrides)?;
    let (text, status) = match cli.command {
        Command::Eval { z, s, m } => (commands::eval(&cfg, &z, &s, m)?, Ok(())),
        Command::Mscan { s, re, im } => commands::mscan(&cfg, &s, re.as_deref(), im.as_deref(), cli.strict)?,
        Command::Weyl { n, p, q, query } => (commands::weyl(&cfg, n, &p, q.as_deref(), query)?, Ok(())),
        Command::EngineDemo { case } => (commands::engine_demo(&cfg, case)?, Ok(())),
    };
    match &cfg.output.path {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = out.write_all(text.as_bytes());
        }
    }
    status
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

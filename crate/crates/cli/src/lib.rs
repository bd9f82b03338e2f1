//! The `squid` command-line tool.
//!
//! Exit codes: 0 success, 1 usage or argument error, 2 malformed input data,
//! 3 I/O failure, 4 degenerate computation.

mod args;
mod commands;

use std::ffi::OsString;
use std::fmt;
use std::path::PathBuf;

use clap::Parser;
use squid_core::Error;

pub use args::Cli;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_FORMAT: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_DEGENERATE: u8 = 4;

#[derive(Debug, Default)]
pub struct CommandOutcome {
    pub exit_code: u8,
    pub artifacts: Vec<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Output { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Output { .. } => EXIT_IO,
            CliError::Core(e) => match e {
                Error::Argument(_) | Error::Range(_) => EXIT_USAGE,
                Error::Validation(_) | Error::Format { .. } | Error::SizeMismatch { .. } => {
                    EXIT_FORMAT
                }
                Error::Io { .. } => EXIT_IO,
                Error::Degenerate(_) => EXIT_DEGENERATE,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Output { path, message } => {
                write!(f, "cannot write {}: {message}", path.display())
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

/// Parses `argv` (program name first), runs the command and reports
/// diagnostics on standard error.
pub fn run<I, T>(argv: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let exit_code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            return CommandOutcome {
                exit_code,
                artifacts: Vec::new(),
            };
        }
    };
    match commands::execute(cli) {
        Ok(artifacts) => {
            for a in &artifacts {
                eprintln!("wrote {}", a.display());
            }
            CommandOutcome {
                exit_code: 0,
                artifacts,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            CommandOutcome {
                exit_code: e.exit_code(),
                artifacts: Vec::new(),
            }
        }
    }
}

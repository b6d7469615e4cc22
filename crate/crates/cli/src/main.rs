//! `sparsedom` command-line tool.
//!
//! Exit status: 0 on success (and when every asserted check passes), 2 when
//! a check fails, 1 on usage, input or I/O errors.

mod commands;
mod io;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or parameters out of range.
    Usage(String),
    /// Unreadable or malformed input.
    Input(String),
    Core(sparsedom::Error),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Input(format!("{}: {e}", path.display()))
    }
}

impl From<sparsedom::Error> for CliError {
    fn from(e: sparsedom::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

/// Whether the command's asserted checks held.
pub enum Outcome {
    Pass,
    Fail,
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("SPARSEDOM_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("SPARSEDOM_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match commands::Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = configure_threads().and_then(|_| commands::run(cli));
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

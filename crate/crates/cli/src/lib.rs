//! Command-line front end: argument parsing, report assembly and the exit
//! code contract (0 ok, 2 usage, 3 invariant failure, 4 resource budget).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;
use thiserror::Error;

pub mod args;
pub mod commands;
pub mod render;

use args::{Cli, Command};
use commands::Outcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invariant(String),
    #[error("{0}")]
    Budget(String),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Invariant(_) | CliError::Io { .. } => EXIT_INVARIANT,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

/// What a finished invocation printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Bounds { shape, .. } => commands::bounds(*shape),
        Command::Enumerate {
            shape,
            n,
            kind,
            limits,
            ..
        } => commands::enumerate(*shape, *n, *kind, *limits),
        Command::Geometry {
            shape,
            n,
            limits,
            out,
        } => commands::geometry(*shape, *n, *limits, out.format),
        Command::Displacement {
            shape,
            n,
            epsilon,
            limits,
            ..
        } => commands::displacement(*shape, *n, *epsilon, *limits),
        Command::Eigen { system, .. } => commands::eigen(system.as_deref()),
        Command::Asymptotics { d_range, .. } => commands::asymptotics(*d_range),
        Command::DumpMap {
            shape,
            radius,
            vertex_budget,
            ..
        } => commands::dump_map(*shape, *radius, *vertex_budget),
    }
}

fn execute_command(command: &Command) -> Result<(String, Vec<String>), CliError> {
    let out = command.output();
    let outcome = match out.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w as usize)
            .build()
            .map_err(|e| CliError::Usage(format!("--workers: {e}")))?
            .install(|| dispatch(command))?,
        None => dispatch(command)?,
    };
    let text = outcome.doc.render(out.format);
    Ok((text, outcome.failures))
}

/// Parses `argv` (including the program name) and runs it. Nothing is
/// printed; the caller decides where the text goes.
pub fn execute<I, T>(argv: I) -> Execution
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == EXIT_OK {
                (text, String::new())
            } else {
                (String::new(), text)
            };
            return Execution {
                code,
                stdout,
                stderr,
            };
        }
    };
    let fail = |e: CliError| Execution {
        code: e.exit_code(),
        stdout: String::new(),
        stderr: format!("error: {e}\n"),
    };
    let (text, failures) = match execute_command(&cli.command) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let stdout = match &cli.command.output().output {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => String::new(),
            Err(source) => {
                return fail(CliError::Io {
                    path: path.clone(),
                    source,
                })
            }
        },
        None => text,
    };
    let stderr: String = failures
        .iter()
        .map(|f| format!("invariant failure: {f}\n"))
        .collect();
    Execution {
        code: if failures.is_empty() {
            EXIT_OK
        } else {
            EXIT_INVARIANT
        },
        stdout,
        stderr,
    }
}

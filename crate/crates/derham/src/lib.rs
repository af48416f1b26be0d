//! Command-line front end for `derham-core`: batch verification, dimension
//! tables and basis export, with JSON reports.

pub mod commands;
pub mod config;
pub mod report;

use clap::Parser;

pub use commands::{run, EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
pub use config::{Cli, Command, CommandKind, RunConfig, JOBS_ENV};
pub use report::Report;

/// Parses `argv`, runs it and returns the process exit code. Usage errors
/// and I/O failures map to [`EXIT_USAGE`].
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let (kind, args) = match &cli.command {
        Command::Verify(a) => (CommandKind::Verify, a),
        Command::Table(a) => (CommandKind::Table, a),
        Command::Basis(a) => (CommandKind::Basis, a),
    };
    let jobs_env = std::env::var(JOBS_ENV).ok();
    let result = RunConfig::new(kind, args, jobs_env.as_deref()).and_then(|cfg| run(&cfg));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {:#}", e);
            EXIT_USAGE
        }
    }
}

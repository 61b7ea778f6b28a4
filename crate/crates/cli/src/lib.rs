//! The `eiskit` command line: argument parsing, command dispatch and run
//! reports.
//!
//! Exit codes: 0 proved (or success for commands without a verdict), 1
//! disproved or countermodel found, 2 unknown or no countermodel within
//! the bound, 64 usage error, 65 malformed input data, 66 unreadable input
//! file, 73 output file not writable, 74 standard output not writable.

pub mod args;
mod commands;
pub mod report;

use std::io::{ErrorKind, Write};
use std::time::Instant;

use args::{Cli, Command};
use report::{Outcome, RunReport, Timing};

/// A command that could not run.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const NO_INPUT: i32 = 66;
    pub const CANT_CREATE: i32 = 73;
    pub const IO_ERR: i32 = 74;

    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

/// Runs the command in the current thread pool.
pub fn run(cli: &Cli, parallel: bool) -> Result<(Outcome, RunReport), Failure> {
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Prove(a) => commands::prove(a, parallel),
        Command::Solve(a) => commands::solve(a, parallel),
        Command::Check(a) => commands::check(a, parallel),
        Command::Enumerate(a) => commands::enumerate(a),
        Command::Cycles(a) => commands::cycles(a),
        Command::Termination(a) => commands::termination(a),
        Command::Export(a) => commands::export(a),
        Command::Qe(a) => commands::qe(a),
        Command::Theory(a) => commands::theory(a),
    }?;
    let report = RunReport {
        command: serde_json::to_value(&cli.command).expect("arguments serialize"),
        verdict: outcome.verdict.map(str::to_string),
        justification: outcome.justification.clone(),
        budget: outcome.budget.clone(),
        consumed: outcome.consumed.clone(),
        artifacts: outcome.artifacts.clone(),
        timing: Timing { elapsed_ms: start.elapsed().as_millis() as u64 },
    };
    Ok((outcome, report))
}

/// Runs the command in a pool of `--threads` workers and prints the result.
/// Returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .stack_size(64 << 20)
        .build()
        .expect("thread pool");
    let parallel = pool.current_num_threads() > 1;
    match pool.install(|| run(&cli, parallel)) {
        Ok((outcome, report)) => {
            let text = if cli.json {
                serde_json::to_string_pretty(&report).expect("report serializes") + "\n"
            } else {
                outcome.text.clone()
            };
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // a reader that went away early is not an error
                Err(e) if e.kind() != ErrorKind::BrokenPipe => {
                    eprintln!("eiskit: cannot write output: {e}");
                    Failure::IO_ERR
                }
                _ => outcome.exit_code(),
            }
        }
        Err(f) => {
            eprintln!("eiskit: {}", f.message);
            f.code
        }
    }
}

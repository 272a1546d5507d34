//! `cedesign` command-line tool.

mod args;
mod commands;
mod config;
mod manifest;

use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches};

use args::{Cli, Command};
use cedesign::Error;

/// Exit status for a library error.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::UnknownPdp { .. } | Error::InvalidPdp(_) => 1,
        Error::Format(_) | Error::Dimension(_) | Error::Io(_) | Error::OddBitCount(_) | Error::BitCount { .. } => 2,
        Error::NonFinite(_) | Error::NotPsd(_) | Error::Diverged { .. } | Error::ZeroPilot { .. } => 3,
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let argv = match config::expand(&Cli::command(), argv) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let matches = match Cli::command().args_override_self(true).try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let resolved = config::resolved(&Cli::command(), &matches);
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(a, &resolved),
        Command::Train(a) => commands::train(a, &resolved),
        Command::Eval(a) => commands::eval(a, &resolved),
        Command::Analyze(a) => commands::analyze(a, &resolved),
        Command::Registry => commands::registry(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // A closed pipe (`cedesign registry | head`) is not a failure.
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod format;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use commands::{CliError, Outcome};
use config::{Cli, Command, RunConfig, EXIT_NUMERIC};

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    let outcome = match cfg.command {
        Command::Steady => commands::steady(&cfg)?,
        Command::Evolve => commands::evolve(&cfg)?,
        Command::Concurrence => commands::concurrence_cmd(&cfg)?,
        Command::Scan => commands::scan(&cfg)?,
        Command::Validate => {
            let (outcome, text) = commands::validate(&cfg)?;
            print!("{text}");
            if cfg.output.is_none() {
                return Ok(Outcome {
                    artifact: String::new(),
                    ..outcome
                });
            }
            outcome
        }
    };
    match &cfg.output {
        Some(path) => std::fs::write(path, &outcome.artifact)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(outcome.artifact.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))?;
        }
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for note in &outcome.notes {
                eprintln!("{note}");
            }
            if outcome.failed {
                ExitCode::from(EXIT_NUMERIC as u8)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

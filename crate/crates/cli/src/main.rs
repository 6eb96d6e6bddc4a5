//! `coopsig`: generate trials, run the simulation batteries and summarize
//! their records.

mod config;
mod execute;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::{resolve, resolve_report, Cli, Command, CommandArgs, FileConfig, UsageError};

fn configure(cli: Cli) -> Result<config::RunConfig, UsageError> {
    let (command, flags) = match cli.command {
        CommandArgs::Report(r) => return resolve_report(&r),
        CommandArgs::GenTrials(f) => (Command::GenTrials, f),
        CommandArgs::Run(f) => (Command::Run, f),
        CommandArgs::Sim1(f) => (Command::Sim1, f),
        CommandArgs::Sim2(f) => (Command::Sim2, f),
    };
    let file = match &flags.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    resolve(command, &flags, &file)
}

fn main() -> ExitCode {
    // clap exits with 2 on its own usage errors
    let cli = Cli::parse();
    let cfg = match configure(cli) {
        Ok(cfg) => cfg,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    match execute::execute(&cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(execute::RuntimeError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

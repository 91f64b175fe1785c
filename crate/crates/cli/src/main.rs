mod args;
mod commands;
mod error;
mod inputs;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match &cli.command {
        Command::Povm(a) => commands::povm(a),
        Command::Analyze(a) => commands::analyze_cmd(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Scan(a) => commands::scan(a),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

mod args;
mod convergence;
mod generate;
mod output;
mod problem;
mod solve;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

const EXIT_INPUT: u8 = 2;
const EXIT_UNREACHED: u8 = 3;

pub enum Status {
    Success,
    /// Output was written but the tolerance was not met.
    Unreached(String),
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => solve::run(a),
        Command::Convergence(a) => convergence::run(a),
        Command::Generate(a) => generate::run(a),
    };
    match result {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Unreached(msg)) => {
            eprintln!("paramexpmv: tolerance not reached: {msg}");
            ExitCode::from(EXIT_UNREACHED)
        }
        Err(e) => {
            eprintln!("paramexpmv: error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

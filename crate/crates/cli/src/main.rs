mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, IrCommand};
use output::{CliError, CliResult};

fn run(cli: Cli) -> CliResult {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let stamp = cli.timestamp;
    match &cli.command {
        Command::Curves(a) => commands::curves(a, stamp),
        Command::Ir(IrCommand::Solve) => commands::ir_solve(),
        Command::Ir(IrCommand::Scan(a)) => commands::ir_scan_cmd(a, stamp),
        Command::Simulate(a) => commands::simulate(a, stamp),
        Command::Verify(a) => commands::verify(a),
        Command::E91(a) => commands::e91(a, stamp),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

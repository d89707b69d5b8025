use std::process::ExitCode;

use clap::Parser;
use rotwave_cli::config::{Cli, RunConfig};
use rotwave_cli::{commands, emit, CliError};

fn run() -> Result<bool, CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            // clap reports --help and --version through the error path.
            std::process::exit(if code == 0 { 0 } else { 2 });
        }
    };
    let cfg = RunConfig::resolve(&cli.command)?;
    let outcome = commands::run(&cfg)?;
    emit(&outcome, cfg.out.as_deref())?;
    Ok(!outcome.failed)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("rotwave: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

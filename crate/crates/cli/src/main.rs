use std::process::ExitCode;

use clap::Parser;
use qcavity_cli::{run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qcavity {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

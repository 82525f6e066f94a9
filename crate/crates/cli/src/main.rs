use std::process::ExitCode;

use clap::Parser;
use outpurity_cli::{execute, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = RunConfig::from_cli(cli).and_then(|config| execute(&config));
    match status {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

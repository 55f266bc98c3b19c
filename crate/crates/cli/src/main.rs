use std::process::ExitCode;

use clap::Parser;

use genbound_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("genbound: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

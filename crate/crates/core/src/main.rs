use std::process::ExitCode;

use coherent_access::cli::{self, CliError};

fn main() -> ExitCode {
    let outcome = cli::parse_args(std::env::args_os()).and_then(|config| cli::run(&config));
    match outcome {
        Ok(table) => {
            for warning in &table.warnings {
                eprintln!("warning: {warning}");
            }
            ExitCode::SUCCESS
        }
        Err(CliError::Info(text)) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            if let CliError::Usage(text) = &err {
                eprintln!("{text}");
            }
            eprintln!("{}", err.record());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

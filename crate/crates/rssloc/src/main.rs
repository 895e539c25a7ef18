use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = rssloc::cli::Cli::parse();
    match rssloc::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

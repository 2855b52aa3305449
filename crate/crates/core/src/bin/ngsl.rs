use std::process::ExitCode;

use clap::Parser;

use ngsl::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let code = match run(&cli.command, &mut stdout) {
        Ok(verdict) => verdict.exit_code(),
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

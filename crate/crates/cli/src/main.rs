use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use stackelberg_cli::{execute, render, Cli, Result, RunConfig};

fn run(cli: Cli) -> Result<bool> {
    let config = RunConfig::resolve(cli)?;
    let outcome = execute(&config)?;
    let text = render(&config, &outcome)?;
    match &config.output {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    if !outcome.passed {
        eprintln!("certification failed");
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

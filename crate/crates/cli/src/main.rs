mod args;
mod commands;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use mollifier_core::Result;

use args::RunConfig;

fn run(config: &RunConfig) -> Result<()> {
    let format = config.format.unwrap_or_else(|| config.command.default_format());
    let outcome = commands::run(&config.command)?;
    // Render into memory first so a failed run never leaves a partial file.
    let mut buf = Vec::new();
    output::render(config, outcome, format, &mut buf)?;
    match &config.output {
        Some(path) => {
            let mut f = BufWriter::new(File::create(path)?);
            f.write_all(&buf)?;
            f.flush()?;
        }
        None => std::io::stdout().lock().write_all(&buf)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let config = RunConfig::parse();
    match run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(output::exit_code(&e) as u8)
        }
    }
}

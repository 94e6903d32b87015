use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use jacobi_spectra::cli::{self, Command, RunConfig, EXIT_CONFIG, EXIT_IO};

/// Spectral distributions of almost-periodic tridiagonal operators.
#[derive(Debug, Parser)]
#[command(name = "jacobi-spectra", version)]
struct Args {
    /// Pipeline to run.
    #[arg(value_enum)]
    command: Command,

    /// Configuration file (`key = value` lines with a `[potential]` section).
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override a config key, e.g. `--set potential.theta=pi/3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match &args.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return ExitCode::from(EXIT_IO as u8);
            }
        },
        None => String::new(),
    };
    let config = match RunConfig::from_text(&text, Some(args.command), &args.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    ExitCode::from(cli::run(&config) as u8)
}

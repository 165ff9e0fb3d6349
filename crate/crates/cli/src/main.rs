//! Command-line front end: ingest -> estimators -> filter -> curve files.

mod commands;
mod output;
mod simspec;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "spreadfit",
    version,
    about = "Issuer discount curves, default spreads, and confidence bands from daily bond prices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit per-issuer spread curves for a single trade date
    Fit(commands::fit::FitArgs),
    /// Run the day-over-day posterior filter across a date range
    Filter(commands::filter::FilterArgs),
    /// Generate a synthetic bond universe from a TOML spec
    Simulate(commands::simulate::SimulateArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(args) => commands::fit::run(args),
        Command::Filter(args) => commands::filter::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

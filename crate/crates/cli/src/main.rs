//! `landauer` — finite-time bit-reset simulator and bound checker.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "landauer",
    version,
    about = "Finite-time two-level bit reset: work distributions, analytic bounds, \
             and a two-bath engine cycle",
    after_help = "Set LANDAUER_WORKERS to override the worker-thread count. \
                  All outputs are deterministic in (config, seed)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact and sampled work distributions with their analytic bounds.
    Distribution(commands::distribution::DistributionArgs),
    /// Simulate the two-bath reset/extraction cycle.
    Engine(commands::engine::EngineArgs),
    /// Check every bound against simulation on a config grid.
    Verify(commands::verify::VerifyArgs),
    /// Uncorrected vs corrected quench work across a basis-rotation sweep.
    CoherenceDemo(commands::coherence_demo::CoherenceDemoArgs),
    /// Sweep one parameter and tabulate bounds and simulated values.
    Sweep(commands::sweep::SweepArgs),
}

fn configure_workers() {
    if let Ok(value) = std::env::var("LANDAUER_WORKERS") {
        match value.parse::<usize>() {
            Ok(workers) if workers >= 1 => {
                // Ignore failure: the pool may already be initialized.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(workers)
                    .build_global();
            }
            _ => eprintln!("warning: ignoring invalid LANDAUER_WORKERS={value}"),
        }
    }
}

fn run() -> Result<u8> {
    configure_workers();
    let cli = Cli::parse();
    match cli.command {
        Command::Distribution(args) => commands::distribution::run(args),
        Command::Engine(args) => commands::engine::run(args),
        Command::Verify(args) => commands::verify::run(args),
        Command::CoherenceDemo(args) => commands::coherence_demo::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::from(2)
        }
    }
}

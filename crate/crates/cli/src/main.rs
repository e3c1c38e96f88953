//! Batch-analysis command line for entangled two-photon-absorption
//! experiments: joint-spectrum timing, photon-number calibration, beam
//! flux, cross-section bounds and extraction, synthetic runs, power-law
//! fits and stability analysis.

mod commands;
mod config;
mod error;
mod io;
mod report;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "e2pa",
    about = "Analysis toolkit for entangled two-photon-absorption sensitivity experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entanglement time and coincidence ratios from a joint spectrum
    Te(commands::te::TeArgs),
    /// Mean photon number from measured count rates
    Mu(commands::mu::MuArgs),
    /// Beam geometry and peak photon flux
    Flux(commands::flux::FluxArgs),
    /// Cross-section upper bounds and quantum-advantage bounds per sample
    Bounds(commands::bounds::BoundsArgs),
    /// Classical cross-section from a fitted quadratic slope
    #[command(name = "sigma-c")]
    SigmaC(commands::sigma_c::SigmaCArgs),
    /// Generate synthetic chopper-modulated count series
    Simulate(commands::simulate::SimulateArgs),
    /// Subtract, fit and extract a cross-section from series files
    Fit(commands::fit::FitArgs),
    /// Allan-deviation stability analysis of a count series
    Allan(commands::allan::AllanArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Te(args) => commands::te::run(args),
        Command::Mu(args) => commands::mu::run(args),
        Command::Flux(args) => commands::flux::run(args),
        Command::Bounds(args) => commands::bounds::run(args),
        Command::SigmaC(args) => commands::sigma_c::run(args),
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Fit(args) => commands::fit::run(args),
        Command::Allan(args) => commands::allan::run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

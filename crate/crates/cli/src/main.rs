//! `csl`: simulation, analytic curves, comparisons and tail studies for
//! circumspheres of random simplices in the unit ball.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;
mod compare;
mod extremes;
mod failure;
mod manifest;
mod pdf;
mod simulate;
mod table1;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use failure::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "csl",
    version,
    about = "Circumspheres of random simplices in the unit ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the Monte Carlo engine and write the result, histograms and manifest.
    Simulate(simulate::Args),
    /// Tabulate an analytic density.
    Pdf(pdf::Args),
    /// Compare a simulation result with the analytic laws.
    Compare(compare::Args),
    /// Containment probabilities for n = 2, d = 2..9, exact and simulated.
    Table1(table1::Args),
    /// Block-maxima Frechet fits of the circumradius tail.
    Extremes(extremes::Args),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Failure::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Simulate(a) => simulate::run(a, &argv),
        Command::Pdf(a) => pdf::run(a, &argv),
        Command::Compare(a) => compare::run(a, &argv),
        Command::Table1(a) => table1::run(a, &argv),
        Command::Extremes(a) => extremes::run(a, &argv),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

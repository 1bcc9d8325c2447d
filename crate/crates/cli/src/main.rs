//! Command-line front end: every pipeline as a reproducible, file-based
//! subcommand. Exit codes: 0 success, 2 usage, 3 numeric or consistency
//! failure.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod csvout;
mod manifest;
mod runner;

#[derive(Parser)]
#[command(name = "pathdim", version, about = "Flux-line interference scans and path-dimension estimation")]
struct Cli {
    /// Worker threads for grid scans and Monte Carlo chains.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory for tables and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Free-propagator partial-wave convergence tables.
    Propagator(commands::propagator::Args),
    /// Scan |K_ab - K_semiclassical| over (h, alpha) grids.
    Exp1(commands::exp1::Args),
    /// Intensity synthesis, amplitude reconstruction and the dimension fit.
    Exp2(commands::exp2::Args),
    /// Lattice Monte Carlo dimension estimate.
    Pimc(commands::pimc::Args),
    /// Decode winding numbers from an exact total flux.
    Decode(commands::decode::Args),
    /// Power-law fit over a (scale, length) table.
    Fit(commands::fit::Args),
    /// Re-execute a previous run from its manifest.
    Rerun(commands::rerun::Args),
}

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().is_err() {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match dispatch(&cli, &argv) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(3);
        }
    }
}

fn dispatch(cli: &Cli, argv: &[String]) -> anyhow::Result<()> {
    let ctx = manifest::RunContext::new(&cli.out, argv)?;
    match &cli.cmd {
        Cmd::Propagator(args) => commands::propagator::run(args, ctx),
        Cmd::Exp1(args) => commands::exp1::run(args, ctx),
        Cmd::Exp2(args) => commands::exp2::run(args, ctx),
        Cmd::Pimc(args) => commands::pimc::run(args, ctx),
        Cmd::Decode(args) => commands::decode::run(args),
        Cmd::Fit(args) => commands::fit::run(args),
        Cmd::Rerun(args) => commands::rerun::run(args, &cli.out),
    }
}

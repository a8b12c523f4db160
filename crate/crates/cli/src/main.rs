//! `qkm`: gas state equations, randomness audits and wall-mixing
//! simulations from the command line.
//!
//! Exit codes: 0 success, 2 validation error, 3 I/O or format error.

mod manifest;
mod randomness;
mod sim;
mod state;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qkm_core::{Exec, QkmError};

#[derive(Parser)]
#[command(name = "qkm", version, about)]
struct Cli {
    /// Run batches on a single thread
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the full equilibrium state of a gas
    State(state::StateArgs),
    /// Evaluate the state along a grid of T, V or N (CSV)
    Sweep(state::SweepArgs),
    #[command(subcommand)]
    Randomness(randomness::RandomnessCmd),
    #[command(subcommand)]
    Sim(sim::SimCmd),
}

fn run(cli: &Cli) -> qkm_core::Result<()> {
    let exec = if cli.sequential { Exec::Sequential } else { Exec::Parallel };
    match &cli.cmd {
        Command::State(a) => state::cmd_state(a),
        Command::Sweep(a) => state::cmd_sweep(a, exec),
        Command::Randomness(c) => randomness::run(c, exec),
        Command::Sim(c) => sim::run(c, exec),
    }
}

fn exit_code(e: &QkmError) -> u8 {
    if e.is_validation() {
        2
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

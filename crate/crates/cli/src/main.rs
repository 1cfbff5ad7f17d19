//! `telic`: run reachability, refinement and navigation experiments from a
//! JSON config, writing CSV/JSON data, SVG figures and a run manifest.
//!
//! Exit codes: 0 on success, 2 when the run completed but the answer is
//! negative (an unreachable state, a failed refinement, a non-monotone curve),
//! 1 on usage, config or I/O errors.

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use telic::Base;

#[derive(Parser, Debug)]
#[command(
    name = "telic",
    version,
    about = "Telic state reachability and refinement experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the operation named in the config's `operation` field.
    Run(RunArgs),
    /// Random-walk trajectories for each configured policy.
    Simulate(RunArgs),
    /// Policy-space phase plot with state regions, budget contour and projections.
    Phase(RunArgs),
    /// Reachability report under the per-step budget.
    Reach(RunArgs),
    /// Split unreachable states until every state is reachable.
    Refine(RunArgs),
    /// Goal-complexity and granularity-complexity curves.
    Curves(RunArgs),
    /// Monte Carlo estimate of the decay rate of reaching a discrete state.
    Sanov(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides the config's `out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed; overrides the config's `seed` (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Unit of reported divergences; overrides the config's `base`.
    #[arg(long)]
    base: Option<Base>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (op, args) = match cli.command {
        Command::Run(a) => (None, a),
        Command::Simulate(a) => (Some(config::Operation::Simulate), a),
        Command::Phase(a) => (Some(config::Operation::Phase), a),
        Command::Reach(a) => (Some(config::Operation::Reach), a),
        Command::Refine(a) => (Some(config::Operation::Refine), a),
        Command::Curves(a) => (Some(config::Operation::Curves), a),
        Command::Sanov(a) => (Some(config::Operation::Sanov), a),
    };
    match commands::execute(op, &args) {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Negative(why)) => {
            eprintln!("{why}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

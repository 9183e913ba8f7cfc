//! `gpfield` — pseudospectral simulation and verification of defocusing
//! nonlinear Schrödinger dynamics over a non-vanishing background.
//!
//! Exit codes: 0 on success, 1 when a computed check fails (hypothesis
//! violation, non-contraction, blow-up), 2 on usage or format errors.

// NaN configuration values must fall into the rejection branch, hence the
// `!(x > 0.0)` guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Ctx, Outcome};
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "gpfield",
    about = "Split-step and fixed-point solvers for defocusing NLS with non-vanishing background, \
             with energy-conservation and decomposition diagnostics",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Path to the TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Override the configured RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the defocusing and growth hypotheses of the configured nonlinearity.
    CheckHypotheses(CommonArgs),
    /// Evolve the configured initial data with the split-step scheme.
    Evolve(CommonArgs),
    /// Solve the integral equation by fixed-point iteration (short time).
    Picard(CommonArgs),
    /// Probe the homogeneous dispersive estimate on seeded random data.
    Strichartz(CommonArgs),
    /// Run the splitting and frequency-decomposition identity probes.
    DecomposeTest(CommonArgs),
    /// Evaluate the conserved energy of a single snapshot file.
    Energy {
        #[command(flatten)]
        common: CommonArgs,
        /// Snapshot file (.gpf) holding the perturbation w.
        #[arg(long)]
        snapshot: PathBuf,
    },
    /// Run a time-step refinement study of the split-step scheme.
    Convergence(CommonArgs),
}

type CommandFn = Box<dyn Fn(&Ctx) -> anyhow::Result<Outcome>>;

fn dispatch(cmd: &Command) -> anyhow::Result<Outcome> {
    let (common, run): (&CommonArgs, CommandFn) = match cmd {
        Command::CheckHypotheses(c) => (c, Box::new(commands::check_hypotheses)),
        Command::Evolve(c) => (c, Box::new(commands::evolve_cmd)),
        Command::Picard(c) => (c, Box::new(commands::picard_cmd)),
        Command::Strichartz(c) => (c, Box::new(commands::strichartz_cmd)),
        Command::DecomposeTest(c) => (c, Box::new(commands::decompose_test_cmd)),
        Command::Energy { common, snapshot } => {
            let snapshot = snapshot.clone();
            (
                common,
                Box::new(move |ctx: &Ctx| commands::energy_cmd(ctx, &snapshot)),
            )
        }
        Command::Convergence(c) => (c, Box::new(commands::convergence_cmd)),
    };
    let config = RunConfig::load(&common.config)?;
    let ctx = Ctx::new(config, common.out.clone(), common.seed);
    run(&ctx)
}

/// Failures of a computed check (as opposed to bad input) exit with 1.
fn is_check_failure(err: &anyhow::Error) -> bool {
    matches!(
        err.downcast_ref::<gpfield_core::Error>(),
        Some(
            gpfield_core::Error::BlowUp { .. }
                | gpfield_core::Error::NonContraction { .. }
                | gpfield_core::Error::IterationBudget { .. }
                | gpfield_core::Error::Diagnostics(_)
        )
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(err) if is_check_failure(&err) => {
            eprintln!("check failed: {err:#}");
            ExitCode::from(1)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

//! `wbc`: secrecy regions, channel orderings, BEC/BSC curves and coding
//! simulations for wiretap broadcast channels.

mod commands;
mod error;
mod io;
mod selftest;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "wbc", version, about = "Wiretap broadcast channel toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Degraded, less-noisy and more-capable checks on one receiver pair.
    Ordering(OrderingArgs),
    /// Hull vertices of an inner bound, outer bound or capacity region.
    Region(RegionArgs),
    /// Closed-form BEC/BSC secrecy curves and lemma verifiers.
    Becbsc(BecBscArgs),
    /// Monte Carlo run of the binned superposition code.
    Simulate(SimulateArgs),
    /// Fast invariant suite.
    Selftest,
}

#[derive(Copy, Clone, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Pair {
    /// Legitimate receiver 1 against the eavesdropper.
    Y1z,
    /// Legitimate receiver 2 against the eavesdropper.
    Y2z,
    /// Receiver 1 against receiver 2.
    Y1y2,
}

#[derive(Args, Debug)]
struct OrderingArgs {
    /// Channel JSON file.
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, value_enum)]
    pair: Pair,
    /// Random input laws for the sampled checks.
    #[arg(long, default_value_t = wbc_core::ordering::DEFAULT_SAMPLES)]
    samples: usize,
    /// Simplex grid resolution for the more-capable check.
    #[arg(long, default_value_t = wbc_core::ordering::DEFAULT_GRID)]
    grid: usize,
    /// Residual tolerance of the degradedness LP.
    #[arg(long, default_value_t = wbc_core::ordering::DEFAULT_DEGRADED_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, ValueEnum, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
enum BoundArg {
    Inner,
    OuterCor,
    OuterThm1,
    CapacityAuto,
}

#[derive(Args, Debug)]
struct RegionArgs {
    #[arg(long)]
    channel: PathBuf,
    #[arg(long, value_enum)]
    bound: BoundArg,
    /// Auxiliary cardinalities, e.g. `T=1,Q=2,U1=2,U2=2`.
    #[arg(long, default_value = "")]
    cards: String,
    #[arg(long, default_value_t = wbc_core::regions::DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Input-law grid resolution for deterministic channels.
    #[arg(long, default_value_t = 32)]
    grid: usize,
    /// CSV destination (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BecBscArgs {
    /// Erasure probability of receiver 1.
    #[arg(long, global = true, default_value_t = 0.2)]
    e: f64,
    /// Crossover probability of receiver 2.
    #[arg(long, global = true, default_value_t = 0.1)]
    p2: f64,
    /// Crossover probability of the eavesdropper.
    #[arg(long, global = true, default_value_t = 0.25)]
    p: f64,
    /// Points per curve.
    #[arg(long, global = true, default_value_t = wbc_core::becbsc::DEFAULT_POINTS)]
    points: usize,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    action: BecAction,
}

#[derive(Subcommand, Debug)]
enum BecAction {
    /// Secrecy and standard frontiers (requires admissible parameters).
    Curve,
    /// Standard frontier without secrecy.
    Standard,
    /// Sweep of `p` with `e = 2p`.
    Figure7 {
        #[arg(long, default_value_t = 0.1)]
        p_min: f64,
        #[arg(long, default_value_t = 0.5)]
        p_max: f64,
        #[arg(long, default_value_t = 41)]
        p_steps: usize,
    },
    /// Convexity check of the secrecy frontier.
    VerifyConvexity {
        #[arg(long, default_value_t = 4096)]
        grid: usize,
    },
    /// Series claims; `a` and `a2` default to `1 - 2p` and `1 - 2p2`.
    VerifySeries {
        #[arg(long, default_value_t = 41)]
        k_max: usize,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        a2: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Simulation config JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Blocklengths overriding the config's `n`, e.g. `50,100,200`.
    #[arg(long, value_delimiter = ',')]
    sweep_n: Vec<usize>,
    /// JSON result destination; trial and sweep CSVs are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ordering(a) => commands::ordering(a),
        Command::Region(a) => commands::region(a),
        Command::Becbsc(a) => commands::becbsc(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Selftest => selftest::run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

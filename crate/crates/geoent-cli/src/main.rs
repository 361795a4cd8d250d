//! `geoent`: geometric entanglement of multipartite pure states.
//!
//! Subcommands: `measure` (closest-product-state solver), `schmidt`
//! (bipartite coefficients and entropy), `chain` (sequential single-qubit
//! decompositions), `family` (exactly solved symmetric families), and
//! `fig2` (entanglement-vs-q tables as CSV/SVG).
//!
//! Exit codes: 0 success, 1 input or usage errors, 2 solver non-convergence.

mod commands;
mod svg;

use clap::{Args, Parser, Subcommand};
use std::process::ExitCode;

/// Dense-state size cap: at most 2^GEOENT_MAX_QUBITS amplitudes.
pub const MAX_QUBITS_ENV: &str = "GEOENT_MAX_QUBITS";
pub const DEFAULT_MAX_QUBITS: u32 = 12;

#[derive(Parser)]
#[command(name = "geoent", version, about = "Geometric entanglement measures of multipartite pure states")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Clone)]
pub struct GlobalArgs {
    /// State file to analyze
    #[arg(long, global = true)]
    pub state: Option<String>,
    /// Seed for all solver randomness (xoshiro256++ streams)
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Independent solver restarts
    #[arg(long, global = true, default_value_t = 32)]
    pub restarts: usize,
    /// Residual tolerance for convergence
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Write machine-readable CSV here
    #[arg(long, global = true)]
    pub csv: Option<String>,
    /// Write an SVG chart here (fig2)
    #[arg(long, global = true)]
    pub svg: Option<String>,
    /// Suppress informational header lines
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Find the closest unnormalized product state and report sin^2(theta_C)
    Measure {
        /// List every deduplicated extremum
        #[arg(long)]
        all_extrema: bool,
    },
    /// Schmidt coefficients, entropy, and the single-qubit quadratic
    Schmidt {
        /// Bipartition as comma-separated factor lists, e.g. "0,2|1,3"
        #[arg(long, conflicts_with = "qubit")]
        split: Option<String>,
        /// Single qubit to split off (also reports C and mu_pm)
        #[arg(long)]
        qubit: Option<usize>,
    },
    /// Sequential single-qubit Schmidt chain
    Chain {
        /// Decomposition order, e.g. "2,0,1"
        #[arg(long, conflicts_with = "min_over_orders")]
        order: Option<String>,
        /// Minimize the chain entanglement over all orders (<= 8 qubits)
        #[arg(long)]
        min_over_orders: bool,
    },
    /// Closed forms for one symmetric family at a given q
    Family {
        /// ghz:<p> | w | ring | dicke:<p>
        #[arg(long)]
        family: String,
        #[arg(long)]
        q: usize,
        /// Cross-check against the solver (q <= 7)
        #[arg(long)]
        verify: bool,
    },
    /// Entanglement as a function of q for the four families
    Fig2 {
        #[arg(long, default_value_t = 3)]
        qmin: usize,
        #[arg(long, default_value_t = 20)]
        qmax: usize,
    },
}

/// Failure carrying its process exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure::new(1, message)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Measure { all_extrema } => commands::measure(&cli.global, all_extrema),
        Command::Schmidt { split, qubit } => commands::schmidt(&cli.global, split, qubit),
        Command::Chain {
            order,
            min_over_orders,
        } => commands::chain(&cli.global, order, min_over_orders),
        Command::Family { family, q, verify } => commands::family(&cli.global, &family, q, verify),
        Command::Fig2 { qmin, qmax } => commands::fig2(&cli.global, qmin, qmax),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

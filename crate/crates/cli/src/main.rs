//! `hoffman`: Hoffman and calmness moduli of linear inequality systems from the command line.

mod commands;
mod error;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hoffman_core::Tolerances;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "hoffman",
    version,
    about = "Hoffman, calmness and related moduli of linear inequality systems"
)]
pub struct Cli {
    /// Relative tolerance for active and argmax index detection.
    #[arg(long, global = true, value_name = "TOL")]
    tol_active: Option<f64>,

    /// Slack a strict inequality must exceed.
    #[arg(long, global = true, value_name = "TOL")]
    tol_strict: Option<f64>,

    /// Relative singular-value threshold for numerical rank.
    #[arg(long, global = true, value_name = "TOL")]
    tol_rank: Option<f64>,

    /// Print the normalized system file instead of running the command.
    #[arg(long, global = true)]
    dump_normalized: bool,

    #[command(subcommand)]
    command: Command,
}

/// A system file, an optional grid for continuous systems and an optional right-hand side.
#[derive(Debug, Args)]
pub struct SystemArgs {
    /// System file (JSON).
    system: PathBuf,

    /// Grid step used to discretize a continuous system.
    #[arg(long, value_name = "STEP")]
    grid: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RhsArg {
    /// Right-hand side: `v1,v2,...` or a JSON file with an array or `{"b": [...]}`.
    #[arg(long, value_name = "B", allow_hyphen_values = true)]
    rhs: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Global Hoffman constant of the system.
    Global {
        #[command(flatten)]
        sys: SystemArgs,
        /// Cross-check with the enumeration of all row subsets.
        #[arg(long)]
        exhaustive: bool,
        /// Cap on the number of enumerated subsets.
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Hoffman modulus at a fixed right-hand side.
    At {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        rhs: RhsArg,
    },
    /// Calmness modulus at a feasible point.
    Calmness {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        rhs: RhsArg,
        /// Feasible point `v1,v2,...`.
        #[arg(long, value_name = "X", allow_hyphen_values = true)]
        point: String,
    },
    /// Extreme points of the feasible set within the row space.
    Vertices {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        rhs: RhsArg,
    },
    /// Sampling cross-checks of the modulus at a right-hand side.
    Verify {
        #[command(flatten)]
        sys: SystemArgs,
        #[command(flatten)]
        rhs: RhsArg,
        /// Number of outside samples.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Number of boundary samples.
        #[arg(long, default_value_t = 1_000)]
        boundary: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sup-norm radius of the sampling boxes around extreme points.
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Refinement rounds applied to the outside sample.
        #[arg(long, default_value_t = 0)]
        refine: usize,
    },
    /// Sampled moduli of a built-in multifunction.
    Lab {
        #[arg(long)]
        fixture: String,
        /// Nominal parameter, overriding the fixture default.
        #[arg(long, value_name = "Y", allow_hyphen_values = true)]
        y_bar: Option<String>,
        /// Number of staircase branches.
        #[arg(long)]
        branches: Option<u64>,
        /// `geometric:K` or `default`.
        #[arg(long, default_value = "default")]
        schedule: String,
        /// Samples per local level.
        #[arg(long)]
        samples: Option<usize>,
        /// Samples per global level.
        #[arg(long)]
        global_samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Divergence cap.
        #[arg(long)]
        cap: Option<f64>,
    },
    /// Global constants and calmness of a built-in continuous system over a list of grid steps.
    GridStudy {
        #[arg(long)]
        builtin: String,
        /// Grid steps `s1,s2,...`.
        #[arg(long)]
        steps: String,
        /// Feasible point at which calmness is also reported.
        #[arg(long, value_name = "X", allow_hyphen_values = true)]
        point: Option<String>,
    },
}

impl Cli {
    fn tolerances(&self) -> Result<Tolerances, CliError> {
        let mut tol = Tolerances::default();
        for (slot, value, name) in [
            (&mut tol.active, self.tol_active, "--tol-active"),
            (&mut tol.strict, self.tol_strict, "--tol-strict"),
            (&mut tol.rank, self.tol_rank, "--tol-rank"),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(CliError::Usage(format!("{name} must be a nonnegative real, got {v}")));
                }
                *slot = v;
            }
        }
        Ok(tol)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(report) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("serializable report")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hoffman: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! `nritt`: classify operators, apply the contour calculi and run the
//! estimators from the command line.
//!
//! Exit codes: `0` success, `1` domain error (a JSON error object is printed
//! on stdout), `2` I/O, parse or usage error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nritt::matrixkit::NormKind;
use nritt::regions::RegionKind;
use nritt::stochastics::DEFAULT_SEED;
use serde::Serialize;

use report::Failure;

#[derive(Debug, Parser)]
#[command(name = "nritt", version, about = "Functional calculus for n-Ritt and n-sectorial matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

/// Flags shared by all subcommands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Operator JSON file (for `rbound`, a single operator or an array).
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Function spec: a JSON file path or inline JSON (an array for families).
    #[arg(long, global = true)]
    pub function: Option<String>,
    /// Order n of the region.
    #[arg(long, global = true, default_value_t = 1)]
    pub n: usize,
    /// Certification angle; defaults to the midpoint between the type angle
    /// and the largest admissible angle.
    #[arg(long, global = true)]
    pub gamma: Option<f64>,
    /// Contour angle; defaults to the midpoint between the type angle and gamma.
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Number of angles in the classification or sweep grid.
    #[arg(long, global = true, default_value_t = 64)]
    pub grid: usize,
    /// Shell sampling density.
    #[arg(long, global = true, default_value_t = 32)]
    pub density: usize,
    /// Region family.
    #[arg(long, global = true, value_enum, default_value_t = Kind::Stolz)]
    pub kind: Kind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Stolz,
    Sector,
}

impl From<Kind> for RegionKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Stolz => RegionKind::NStolz,
            Kind::Sector => RegionKind::NSector,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    P1,
    P2,
    Pinf,
}

impl From<Norm> for NormKind {
    fn from(n: Norm) -> Self {
        match n {
            Norm::P1 => NormKind::P1,
            Norm::P2 => NormKind::P2,
            Norm::Pinf => NormKind::PInf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Calculus,
    Profile,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Type angle and sampled resolvent bound of an operator.
    Classify,
    /// Evaluate a function at an operator by the contour calculus.
    Apply,
    /// Compare f(I − T) with (f∘(1 − ·))(T).
    Transfer,
    /// Calculus-constant or multiplier-profile sweep written as CSV.
    Sweep {
        #[arg(long, value_enum, default_value_t = SweepMode::Calculus)]
        mode: SweepMode,
        /// Sequence rule for `--mode profile`.
        #[arg(long, default_value = "1-2^-n")]
        rule: String,
        /// Sequence length for `--mode profile`.
        #[arg(long, default_value_t = 16)]
        dim: usize,
    },
    /// Lower estimate of the R-bound of an operator family.
    Rbound {
        /// Use the sampled family (λ − v)R(λ, T) of the input operator.
        #[arg(long)]
        resolvent_family: bool,
        #[arg(long, default_value_t = 16)]
        max_ops: usize,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        family_size: usize,
        #[arg(long, default_value_t = 200)]
        climb_steps: usize,
    },
    /// Lower estimate of the quadratic calculus constant.
    Quadratic {
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Diagonal multiplier tools.
    Multiplier {
        #[command(subcommand)]
        action: MultiplierAction,
    },
    /// Carleson separation products of points in the right half-plane.
    Carleson {
        /// JSON array of points, each a real number or `[re, im]`.
        #[arg(long)]
        points: PathBuf,
    },
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "action", rename_all = "lowercase")]
pub enum MultiplierAction {
    /// Write the multiplier operator of a sequence rule.
    Gen {
        /// `1-2^-n` or `1-C*Q^n`.
        #[arg(long)]
        rule: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = Norm::P2)]
        norm: Norm,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli.command, &cli.common) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Domain(e)) => {
            println!("{}", report::error_object(e.kind(), &e.to_string()));
            ExitCode::from(1)
        }
        Err(Failure::Input { kind, message }) => {
            eprintln!("error: {message}");
            println!("{}", report::error_object(kind, &message));
            ExitCode::from(2)
        }
    }
}

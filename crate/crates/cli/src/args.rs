//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

#[derive(Debug, Parser)]
#[command(name = "paramexpmv", version, about = "Parameterized solutions of u' = (A_0 + eps A_1 + ... + eps^N A_N) u")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for a list of (t, eps) pairs and print a summary CSV.
    Solve(SolveArgs),
    /// Tabulate error, estimate and bound against the iteration count.
    Convergence(ConvergenceArgs),
    /// Write a built-in problem as MatrixMarket files plus a manifest.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BuiltIn {
    /// 1D advection-diffusion, eps multiplies the advection term
    Advdiff1,
    /// advdiff1 plus an eps^2 anti-diagonal coupling of strength b
    Advdiff2,
    /// 3D damped wave equation, eps is the boundary damping at x = 1
    Wave,
}

#[derive(Debug, Clone, Args)]
pub struct GeneratorArgs {
    /// Interior grid points (advdiff1, advdiff2)
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Diffusion coefficient (advdiff1, advdiff2)
    #[arg(long, default_value_t = 3e-4)]
    pub a: f64,
    /// Coupling strength of A_2 (advdiff2)
    #[arg(long, default_value_t = 2e2)]
    pub b: f64,
    /// Grid points per dimension (wave)
    #[arg(long, default_value_t = 15)]
    pub points: usize,
    /// Damping on the face x = 0 (wave)
    #[arg(long, default_value_t = 2.0)]
    pub gamma1: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Built-in problem
    #[arg(long, value_enum, conflicts_with = "manifest", required_unless_present = "manifest")]
    pub problem: Option<BuiltIn>,
    /// Problem manifest written by `generate` (or by hand)
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    /// Fixed scaling gamma; a trailing `*` makes it relative to the heuristic, e.g. `0.25*`
    #[arg(long, value_delimiter = ',', conflicts_with = "no_scaling")]
    pub gamma: Vec<GammaSpec>,
    /// Work with the unscaled coefficients (gamma = 1)
    #[arg(long)]
    pub no_scaling: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Comma-separated times
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub t: Vec<f64>,
    /// Comma-separated parameters; complex values as `re+imi`
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_scalar)]
    pub eps: Vec<Complex64>,
    /// Target for the a posteriori estimate (default 1e-8 unless --p is given)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Fixed number of Arnoldi steps instead of adaptive termination
    #[arg(long)]
    pub p: Option<usize>,
    /// Iteration cap for adaptive termination
    #[arg(long, default_value_t = 200)]
    pub p_max: usize,
    /// Steps between estimate checks
    #[arg(long, default_value_t = paramexpmv::solver::DEFAULT_CHECK_INTERVAL)]
    pub check_interval: usize,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    /// CSV destination (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for the solution vectors, one MatrixMarket file per CSV row
    #[arg(long)]
    pub solutions: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Time
    #[arg(long)]
    pub t: f64,
    /// Comma-separated parameters; complex values as `re+imi`
    #[arg(long, required = true, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_scalar)]
    pub eps: Vec<Complex64>,
    /// Largest iteration count tabulated
    #[arg(long, default_value_t = 200)]
    pub p_max: usize,
    #[command(flatten)]
    pub scaling: ScalingArgs,
    /// Use a run with p_max + 10 steps as reference instead of the dense exponential
    #[arg(long)]
    pub self_reference: bool,
    /// CSV destination; a gnuplot script is written next to it with extension .gp
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub problem: BuiltIn,
    #[command(flatten)]
    pub generator: GeneratorArgs,
    /// Output directory (created if missing)
    #[arg(long)]
    pub out: PathBuf,
}

/// A scaling factor, absolute or relative to the heuristic choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaSpec {
    Absolute(f64),
    Relative(f64),
}

impl std::str::FromStr for GammaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (num, relative) = match s.strip_suffix('*') {
            Some("") => ("1", true),
            Some(rest) => (rest, true),
            None => (s, false),
        };
        let v: f64 = num.trim().parse().map_err(|_| format!("invalid gamma '{s}'"))?;
        if !(v.is_finite() && v > 0.0) {
            return Err(format!("gamma must be positive and finite, got '{s}'"));
        }
        Ok(if relative { Self::Relative(v) } else { Self::Absolute(v) })
    }
}

pub fn parse_scalar(s: &str) -> Result<Complex64, String> {
    let z: Complex64 = s.trim().parse().map_err(|_| format!("invalid number '{s}'"))?;
    if !z.is_finite() {
        return Err(format!("non-finite value '{s}'"));
    }
    Ok(z)
}

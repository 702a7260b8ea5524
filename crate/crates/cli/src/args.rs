use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "optpgg",
    version,
    about = "Replicator-mutator dynamics of the optional public goods game",
    args_override_self = true,
    allow_negative_numbers = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Expected payoffs and the payoff gap at one population state
    Payoff(PayoffArgs),
    /// Integrate the dynamics and write the trajectory
    Simulate(SimulateArgs),
    /// Stationary points of the mutation-free dynamics with their stability
    Equilibria(AnalysisArgs),
    /// Invasion structure on the three edges of the simplex
    Invasion(AnalysisArgs),
    /// Phase diagram over a grid of (alpha, beta)
    Sweep(SweepArgs),
    /// Randomised comparison of closed-form and enumerated payoffs
    OracleCheck(OracleArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Group size
    #[arg(long = "M", default_value_t = 5)]
    pub m: u32,
    /// Enhancement factor, 1 < r < M
    #[arg(long, default_value_t = 3.0)]
    pub r: f64,
    /// Outside payoff of non-participants
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Payoff each non-participant hands to the participants
    #[arg(long, default_value_t = 0.2)]
    pub beta: f64,
    /// Mutation rate
    #[arg(long, default_value_t = 1e-8)]
    pub mu: f64,
    /// Integration horizon
    #[arg(long = "t-max", default_value_t = 2e4)]
    pub t_max: f64,
    #[arg(long = "rel-tol", default_value_t = 1e-8)]
    pub rel_tol: f64,
    #[arg(long = "abs-tol", default_value_t = 1e-10)]
    pub abs_tol: f64,
    /// Output file; standard output when absent
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// key = value file with defaults for any flag; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores)
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct PayoffArgs {
    #[command(flatten)]
    pub common: Common,
    /// Cooperator share
    #[arg(long)]
    pub x: f64,
    /// Defector share; the rest are non-participants
    #[arg(long)]
    pub y: f64,
    /// Also evaluate the enumeration over group compositions
    #[arg(long)]
    pub oracle: bool,
    /// With --oracle, fail when the two disagree by more than 1e-8
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Initial cooperator share (default 1/3)
    #[arg(long)]
    pub x0: Option<f64>,
    /// Initial defector share (default 1/3)
    #[arg(long)]
    pub y0: Option<f64>,
    /// Spacing of recorded samples
    #[arg(long = "sample-dt", default_value_t = 0.5)]
    pub sample_dt: f64,
}

#[derive(Args, Debug)]
pub struct AnalysisArgs {
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long = "grid-n", default_value_t = 41)]
    pub grid_n: usize,
    #[arg(long = "alpha-min", default_value_t = -1.0)]
    pub alpha_min: f64,
    #[arg(long = "alpha-max", default_value_t = 1.0)]
    pub alpha_max: f64,
    #[arg(long = "beta-min", default_value_t = -1.0)]
    pub beta_min: f64,
    #[arg(long = "beta-max", default_value_t = 1.0)]
    pub beta_max: f64,
    /// Initial condition as `x,y`; repeat for several (default: barycentre)
    #[arg(long = "start", value_parser = parse_start)]
    pub starts: Vec<(f64, f64)>,
    /// Survival threshold on F_C
    #[arg(long, default_value_t = 0.01)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Largest tolerated componentwise deviation
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

fn parse_start(s: &str) -> Result<(f64, f64), String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(x)?, parse(y)?))
}

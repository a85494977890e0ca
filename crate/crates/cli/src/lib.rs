//! Command-line experiment runner. Each subcommand takes a JSON config
//! (`--config`) whose keys can be overridden by flags, and writes CSV or JSON
//! either to `--output`/`output_path` or to stdout.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

pub mod commands;
pub mod config;
pub mod format;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config, or input files: exit 2.
    Usage(String),
    /// A broken internal invariant: exit 3.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<stabcleanse::Error> for CliError {
    fn from(e: stabcleanse::Error) -> Self {
        match e {
            stabcleanse::Error::InvalidState(_) => CliError::Internal(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "stabcleanse", version, about = "Stabilizer entropy, cleansing and purity-bound experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config file; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed (falls back to the config key, then STABCLEANSE_SEED).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sample evaluation. Output does not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output file (default stdout).
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate g and g/g∞ over a grid of t/f values (CSV).
    PhaseCurve(PhaseCurveArgs),
    /// Clifford-orbit averages of the linear entropy on E and F (JSON).
    Prop1(Prop1Args),
    /// Stabilizer-proxy purity bounds for a doped circuit (JSON).
    PurityEstimate(PurityArgs),
    /// Monte Carlo cleansed entropy on E against g, one row per t (CSV).
    McSe(McSeArgs),
    /// Build a doped circuit and its cleansed stabilizer proxy (JSON).
    Cleanse(CleanseArgs),
    /// Two-copy Λ diagnostic on small instances (JSON).
    LambdaCheck(LambdaArgs),
    /// Swap-test baseline and cost comparison (JSON).
    SwapBench(SwapArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct PhaseCurveArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub f_density: Option<f64>,
    /// Comma-separated t/f values.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct Prop1Args {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_e: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// `mc` or `exhaustive` (n ≤ 2).
    #[arg(long)]
    pub mode: Option<String>,
    /// `t-product` or `stabilizer`.
    #[arg(long)]
    pub state: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct DopedArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub t_density: Option<f64>,
    #[arg(long)]
    pub n_f: Option<usize>,
    #[arg(long)]
    pub f_density: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PurityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub doped: DopedArgs,
    /// Circuit file in the text format.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// JSON sidecar of a doped circuit file (default: the circuit path with
    /// a .json extension, when it exists).
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct McSeArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_f: Option<usize>,
    #[arg(long)]
    pub f_density: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub t_min: Option<usize>,
    #[arg(long)]
    pub t_max: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct CleanseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub doped: DopedArgs,
    /// Also write circuit.txt, circuit.json, phi_bar.stab and rho.stab here.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct LambdaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub doped: DopedArgs,
    /// Number of instances.
    #[arg(long)]
    pub count: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SwapArgs {
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub f_density: Option<f64>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Relative error target of the comparison table.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Also write the comparison table as CSV.
    #[arg(long)]
    pub table_path: Option<PathBuf>,
}

/// Primary text plus any side files, written by the caller.
#[derive(Debug, Default)]
pub struct Outcome {
    pub primary: String,
    pub output_path: Option<PathBuf>,
    pub files: Vec<(PathBuf, String)>,
}

fn overrides<T: Serialize>(cli: &Cli, args: &T) -> Result<serde_json::Value, CliError> {
    let mut v = serde_json::to_value(args).map_err(|e| CliError::Internal(e.to_string()))?;
    if let serde_json::Value::Object(o) = &mut v {
        if let Some(s) = cli.seed {
            o.insert("seed".into(), s.into());
        }
        if let Some(p) = &cli.output {
            o.insert("output_path".into(), p.to_string_lossy().into_owned().into());
        }
    }
    Ok(v)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli.config.as_deref();
    macro_rules! cfg {
        ($a:expr) => {
            config::load(path, &overrides(cli, $a)?)?
        };
    }
    match &cli.command {
        Command::PhaseCurve(a) => commands::phase_curve(&cfg!(a)),
        Command::Prop1(a) => commands::prop1(&cfg!(a)),
        Command::PurityEstimate(a) => commands::purity_estimate(&cfg!(a)),
        Command::McSe(a) => commands::mc_se(&cfg!(a)),
        Command::Cleanse(a) => commands::cleanse(&cfg!(a)),
        Command::LambdaCheck(a) => commands::lambda_check(&cfg!(a)),
        Command::SwapBench(a) => commands::swap_bench(&cfg!(a)),
    }
}

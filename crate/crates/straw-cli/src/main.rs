//! Command-line interface: `simulate`, `analyze`, and `estimate-pi`
//! subcommands over the lattice testing library.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use straw_cli::analyze::{cmd_analyze, AnalyzeOptions, MethodName, OutputFormat};
use straw_cli::errors::AppError;
use straw_cli::estimate::{cmd_estimate_pi, EstimateOptions};
use straw_cli::harness::RunConfig;
use straw_cli::scenario::ScenarioKind;
use straw_cli::simulate::{cmd_simulate, SimulateOptions};
use straw_core::field::DEFAULT_CLIP;
use straw_core::procedures::GridSpec;
use straw_core::sparsity::{KernelFamily, KernelSpec};

#[derive(Parser)]
#[command(
    name = "straw",
    version,
    about = "Structure-adaptive weighted multiple testing on regular lattices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo evaluation of all methods on a built-in scenario
    Simulate(SimulateArgs),
    /// Run one testing procedure on a CSV of lattice p-values
    Analyze(AnalyzeArgs),
    /// Estimate local alternative fractions from lattice p-values
    EstimatePi(EstimatePiArgs),
}

#[derive(Args)]
struct EstimationArgs {
    /// Smoothing kernel: gaussian or epanechnikov
    #[arg(long, default_value = "gaussian")]
    kernel: String,

    /// Kernel bandwidth in lattice distance units (default 3, or a
    /// block-sized value for simulate scenarios)
    #[arg(long)]
    bandwidth: Option<f64>,

    /// Neighborhood truncation radius in lattice distance units (default 10,
    /// or three bandwidths for simulate scenarios)
    #[arg(long)]
    truncation: Option<f64>,

    /// Clamp width keeping alternative fractions inside (0, 1)
    #[arg(long, default_value_t = DEFAULT_CLIP)]
    clip: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario name: s1, s2, s3, s4, s5, s6, or null
    #[arg(long)]
    scenario: String,

    /// Fix the signal strength instead of sweeping it
    #[arg(long)]
    mu: Option<f64>,

    /// Fix the in-block signal frequency instead of sweeping it
    #[arg(long)]
    pi: Option<f64>,

    /// Directory for output files
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,

    /// Replications per sweep point
    #[arg(long)]
    reps: Option<usize>,

    /// Nominal false discovery rate level
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,

    /// Base RNG seed; replication r uses seed + r
    #[arg(long, default_value_t = 7)]
    seed: u64,

    /// Shape-parameter grid as B1,B2,L (L equal segments from B1 to B2)
    #[arg(long, default_value = "0.5,5,18")]
    grid: String,

    #[command(flatten)]
    estimation: EstimationArgs,

    /// Shortcut for --reps 25 (an explicit --reps wins)
    #[arg(long)]
    fast: bool,

    /// Worker threads for replications (1 = serial)
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input CSV with header coord1[,coord2[,coord3]],p
    #[arg(long)]
    input: PathBuf,

    /// Output file for per-site decisions
    #[arg(long)]
    output: PathBuf,

    /// bh, lfdr, laws-oracle, laws-dd, straw-oracle, straw-dd, or procedure1
    #[arg(long)]
    method: String,

    /// Nominal false discovery rate level
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,

    /// Shape-parameter grid as B1,B2,L (L equal segments from B1 to B2)
    #[arg(long, default_value = "0.5,5,18")]
    grid: String,

    #[command(flatten)]
    estimation: EstimationArgs,

    /// Weight-shape exponent for procedure1
    #[arg(long, default_value_t = 2.0)]
    k: f64,

    /// CSV with oracle alternative fractions (header coord...,pi1)
    #[arg(long)]
    pi1: Option<PathBuf>,

    /// Output format: csv (decisions CSV plus JSON sidecar) or json
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct EstimatePiArgs {
    /// Input CSV with header coord1[,coord2[,coord3]],p
    #[arg(long)]
    input: PathBuf,

    /// Output CSV for per-site estimates
    #[arg(long)]
    output: PathBuf,

    #[command(flatten)]
    estimation: EstimationArgs,
}

fn parse_grid(s: &str) -> Result<GridSpec, AppError> {
    let parts: Vec<&str> = s.split(',').collect();
    let invalid = || AppError::Usage(format!("--grid expects B1,B2,L, got {s:?}"));
    if parts.len() != 3 {
        return Err(invalid());
    }
    let b1: f64 = parts[0].trim().parse().map_err(|_| invalid())?;
    let b2: f64 = parts[1].trim().parse().map_err(|_| invalid())?;
    let segments: usize = parts[2].trim().parse().map_err(|_| invalid())?;
    GridSpec::new(b1, b2, segments)
        .map_err(|e| AppError::Usage(format!("invalid --grid {s:?}: {e}")))
}

/// Resolves the kernel flags against a base spec: unset flags inherit the
/// base values, explicit flags override them.
fn parse_kernel(args: &EstimationArgs, base: &KernelSpec) -> Result<KernelSpec, AppError> {
    let family = match args.kernel.to_ascii_lowercase().as_str() {
        "gaussian" => KernelFamily::Gaussian,
        "epanechnikov" => KernelFamily::Epanechnikov,
        other => {
            return Err(AppError::Usage(format!(
                "unknown kernel {other:?}; expected gaussian or epanechnikov"
            )))
        }
    };
    KernelSpec::new(
        family,
        args.bandwidth.unwrap_or_else(|| base.bandwidth()),
        args.truncation.unwrap_or_else(|| base.truncation()),
    )
    .map_err(|e| AppError::Usage(format!("invalid kernel configuration: {e}")))
}

fn validate_alpha(alpha: f64) -> Result<(), AppError> {
    if !alpha.is_finite() || !(0.0..1.0).contains(&alpha) {
        return Err(AppError::Usage(format!(
            "--alpha must lie in [0, 1), got {alpha}"
        )));
    }
    Ok(())
}

fn validate_clip(clip: f64) -> Result<(), AppError> {
    if !clip.is_finite() || clip <= 0.0 || clip >= 0.5 {
        return Err(AppError::Usage(format!(
            "--clip must lie strictly between 0 and 0.5, got {clip}"
        )));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Simulate(a) => {
            let scenario = ScenarioKind::parse(&a.scenario).ok_or_else(|| {
                AppError::Usage(format!(
                    "unknown scenario {:?}; expected s1, s2, s3, s4, s5, s6, or null",
                    a.scenario
                ))
            })?;
            validate_alpha(a.alpha)?;
            validate_clip(a.estimation.clip)?;
            let reps = a.reps.unwrap_or(if a.fast { 25 } else { 100 });
            if reps == 0 {
                return Err(AppError::Usage("--reps must be at least 1".into()));
            }
            if a.threads == 0 {
                return Err(AppError::Usage("--threads must be at least 1".into()));
            }
            let run = RunConfig {
                reps,
                alpha: a.alpha,
                base_seed: a.seed,
                grid: parse_grid(&a.grid)?,
                kernel: parse_kernel(&a.estimation, &scenario.default_kernel())?,
                clip: a.estimation.clip,
                threads: a.threads,
            };
            cmd_simulate(&SimulateOptions {
                scenario,
                mu: a.mu,
                pi: a.pi,
                output_dir: a.output_dir,
                run,
            })
        }
        Command::Analyze(a) => {
            validate_alpha(a.alpha)?;
            validate_clip(a.estimation.clip)?;
            if !a.k.is_finite() || a.k <= 0.0 {
                return Err(AppError::Usage(format!(
                    "--k must be a positive finite number, got {}",
                    a.k
                )));
            }
            cmd_analyze(&AnalyzeOptions {
                input: a.input,
                output: a.output,
                method: MethodName::parse(&a.method)?,
                alpha: a.alpha,
                grid: parse_grid(&a.grid)?,
                kernel: parse_kernel(&a.estimation, &KernelSpec::default())?,
                clip: a.estimation.clip,
                shape_k: a.k,
                pi1: a.pi1,
                format: OutputFormat::parse(&a.format)?,
            })
        }
        Command::EstimatePi(a) => {
            validate_clip(a.estimation.clip)?;
            cmd_estimate_pi(&EstimateOptions {
                input: a.input,
                output: a.output,
                kernel: parse_kernel(&a.estimation, &KernelSpec::default())?,
                clip: a.estimation.clip,
            })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}

//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mrpi_core::bound::{n_min, tail_bound};

use crate::config::{Experiment, RunConfig};
use crate::experiments::{curves, norms, tube};
use crate::failure::usage;

#[derive(Debug, Parser)]
#[command(name = "mrpi", version, about = "Certified truncation of minimal robust invariant sets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tail bound r_W·γᴺ/(1−γ), or the smallest N reaching a tolerance.
    Bound(BoundArgs),
    /// Sampled truncation error against the bound on a random 6-D system.
    Exp1(RunArgs),
    /// The bound under Euclidean, diagonal and Lyapunov norms.
    Exp2(RunArgs),
    /// Truncation error in 10, 15 and 20 dimensions, with timings.
    Exp3(RunArgs),
    /// Baseline and certified tube MPC on a double integrator.
    Exp4(RunArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("target").required(true).args(["n", "epsilon"]))]
pub struct BoundArgs {
    /// Contraction factor, 0 ≤ γ < 1.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Disturbance radius r_W ≥ 0.
    #[arg(long, allow_negative_numbers = true)]
    pub rw: f64,
    /// Truncation horizon.
    #[arg(long)]
    pub n: Option<usize>,
    /// Target distance; prints the smallest sufficient N.
    #[arg(long, allow_negative_numbers = true)]
    pub epsilon: Option<f64>,
}

/// Every flag overrides the matching key of `--config`.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Flat `key = value` file; a previous run's manifest.txt works.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for systems, directions and disturbances.
    #[arg(long)]
    pub seed: Option<String>,
    /// Comma-separated state dimensions.
    #[arg(long)]
    pub dims: Option<String>,
    /// Inclusive range `lo..hi` of truncation horizons.
    #[arg(long)]
    pub n_range: Option<String>,
    /// Number of sampled support directions.
    #[arg(long)]
    pub dir_count: Option<String>,
    /// Horizon of the reference set standing in for the limit.
    #[arg(long)]
    pub k_ref: Option<String>,
    /// Target distance; fixes the default certified horizon.
    #[arg(long)]
    pub epsilon: Option<String>,
    /// `N` or `N+1`.
    #[arg(long)]
    pub exponent_convention: Option<String>,
    /// `euclidean`, `diag:<grid>` or `lyapunov`.
    #[arg(long)]
    pub norm: Option<String>,
    /// Diagonal grid for exp2: `unit` or `geom:<base>:<levels>`.
    #[arg(long)]
    pub diag_grid: Option<String>,
    /// Where CSV, SVG and manifest files go.
    #[arg(long)]
    pub output_dir: Option<String>,
    /// Disturbance rollouts per tube method.
    #[arg(long)]
    pub rollouts: Option<String>,
    /// Closed-loop steps per rollout.
    #[arg(long)]
    pub steps: Option<String>,
    /// Nominal MPC prediction horizon.
    #[arg(long)]
    pub horizon: Option<String>,
    /// Comma-separated tube methods: `baseline`, `certified`, `certified:<N>`.
    #[arg(long)]
    pub methods: Option<String>,
}

impl RunArgs {
    pub fn resolve(&self, experiment: Experiment) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::defaults(experiment);
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        let flags = [
            ("seed", &self.seed),
            ("dims", &self.dims),
            ("n_range", &self.n_range),
            ("dir_count", &self.dir_count),
            ("k_ref", &self.k_ref),
            ("epsilon", &self.epsilon),
            ("exponent_convention", &self.exponent_convention),
            ("norm", &self.norm),
            ("diag_grid", &self.diag_grid),
            ("output_dir", &self.output_dir),
            ("rollouts", &self.rollouts),
            ("steps", &self.steps),
            ("horizon", &self.horizon),
            ("methods", &self.methods),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

pub fn cmd_bound(args: &BoundArgs) -> anyhow::Result<()> {
    if !(0.0..1.0).contains(&args.gamma) {
        return Err(usage(format!("--gamma must satisfy 0 <= gamma < 1, got {}", args.gamma)));
    }
    if !(args.rw >= 0.0 && args.rw.is_finite()) {
        return Err(usage(format!("--rw must be finite and nonnegative, got {}", args.rw)));
    }
    if let Some(n) = args.n {
        println!("tail_bound = {}", tail_bound(args.rw, args.gamma, n)?);
    }
    if let Some(eps) = args.epsilon {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(usage(format!("--epsilon must be positive, got {eps}")));
        }
        let n = n_min(eps, args.gamma, args.rw)?;
        println!("n_min = {n}");
        println!("tail_bound = {}", tail_bound(args.rw, args.gamma, n)?);
    }
    Ok(())
}

pub fn run(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Bound(args) => cmd_bound(args),
        Command::Exp1(args) => {
            let cfg = args.resolve(Experiment::Exp1)?;
            curves::print_report(&curves::run(&cfg)?);
            println!("wrote {}", cfg.output_dir.display());
            Ok(())
        }
        Command::Exp2(args) => {
            let cfg = args.resolve(Experiment::Exp2)?;
            norms::print_report(&norms::run(&cfg)?);
            println!("wrote {}", cfg.output_dir.display());
            Ok(())
        }
        Command::Exp3(args) => {
            let cfg = args.resolve(Experiment::Exp3)?;
            let start = std::time::Instant::now();
            let runs = curves::run(&cfg)?;
            let elapsed = start.elapsed();
            curves::print_report(&runs);
            println!("runtime {:.2} s", elapsed.as_secs_f64());
            println!("wrote {}", cfg.output_dir.display());
            Ok(())
        }
        Command::Exp4(args) => {
            let cfg = args.resolve(Experiment::Exp4)?;
            tube::print_report(&tube::run(&cfg)?);
            println!("wrote {}", cfg.output_dir.display());
            Ok(())
        }
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use udcd::experiments::{
    export_gates, run_angles, run_complexity, run_kernel, run_sweep, run_twolevel_check, KernelGrid,
};
use udcd::RunConfig;

#[derive(Parser)]
#[command(name = "udcd", version, about = "Digitized counterdiabatic driving experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (`key = value` lines).
    #[arg(short, long)]
    config: PathBuf,
    /// Output file; overrides `out` in the config. Defaults to stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Ground-state infidelity against K.
    Sweep(Common),
    /// Kernel curves on an omega grid.
    Kernel {
        #[command(flatten)]
        common: Common,
        /// Comma-separated K values; empty gives the bare kernel.
        #[arg(long, value_delimiter = ',', default_value = "4,8,13,17")]
        ks: Vec<usize>,
        /// Upper end of the grid; defaults to the resolved cutoff.
        #[arg(long)]
        omega_max: Option<f64>,
        #[arg(long, default_value_t = 2000)]
        points: usize,
    },
    /// Angle schedule as CSV.
    Angles(Common),
    /// Gate sequence in the text IR (needs `k`).
    Gates(Common),
    /// Exactness checks for a two-level model.
    TwolevelCheck(Common),
    /// Complexity estimate against step-by-step gate cost.
    Complexity(Common),
}

fn load(common: &Common) -> Result<RunConfig> {
    let text = fs::read_to_string(&common.config)
        .with_context(|| format!("reading {}", common.config.display()))?;
    let cfg = RunConfig::parse(&text).with_context(|| common.config.display().to_string())?;
    Ok(cfg)
}

fn emit(common: &Common, cfg: &RunConfig, body: &str) -> Result<()> {
    let path = common.out.clone().or_else(|| cfg.out.as_ref().map(PathBuf::from));
    match path {
        Some(p) => fs::write(&p, body).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Sweep(c) => {
            let cfg = load(c)?;
            emit(c, &cfg, &run_sweep(&cfg)?.render())
        }
        Command::Kernel { common, ks, omega_max, points } => {
            let cfg = load(common)?;
            let grid = KernelGrid {
                ks: ks.clone(),
                omega_max: *omega_max,
                points: *points,
            };
            emit(common, &cfg, &run_kernel(&cfg, &grid)?.render())
        }
        Command::Angles(c) => {
            let cfg = load(c)?;
            emit(c, &cfg, &run_angles(&cfg)?.render())
        }
        Command::Gates(c) => {
            let cfg = load(c)?;
            emit(c, &cfg, &export_gates(&cfg)?)
        }
        Command::TwolevelCheck(c) => {
            let cfg = load(c)?;
            emit(c, &cfg, &run_twolevel_check(&cfg)?.render())
        }
        Command::Complexity(c) => {
            let cfg = load(c)?;
            emit(c, &cfg, &run_complexity(&cfg)?.render())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("udcd: {e:#}");
            ExitCode::FAILURE
        }
    }
}

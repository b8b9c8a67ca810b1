//! `lsh`: simulate, fit and check latent space hypergraph models.

mod commands;
mod config;
mod error;
mod model;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::CliResult;

#[derive(Parser)]
#[command(name = "lsh", version, about = "Latent space hypergraph models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// key = value config file
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Root seed (overrides `seed`)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides `out_dir`)
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Override a config key, e.g. --set n=30 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Lsh,
    Beta,
    Lca,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlacementArg {
    Gaussian,
    Peripheral,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a hypergraph from the latent space model or a baseline
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        model: Option<ModelKind>,
    },
    /// Run the MCMC sampler on a hypergraph
    Fit {
        #[command(flatten)]
        common: Common,
        /// Independent chains, run one after another
        #[arg(long)]
        chains: Option<usize>,
    },
    /// Posterior predictive degrees, motifs and qq table from a fit
    Predict {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        placement: Option<PlacementArg>,
    },
    /// Connection-probability sweeps and degree pmf tables
    Theory {
        #[command(flatten)]
        common: Common,
    },
    /// Print summary statistics of a hypergraph file
    Summarize {
        /// Hypergraph file
        file: PathBuf,
        /// Also write the panel as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Initial latent coordinates and parameters only
    Init {
        #[command(flatten)]
        common: Common,
    },
}

/// Config file, then `--set` overrides, then dedicated flags.
fn load(common: &Common, flags: &[(&str, Option<String>)]) -> CliResult<(RunConfig, u64)> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for s in &common.set {
        cfg.set(s)?;
    }
    if let Some(s) = common.seed {
        cfg.insert("seed", s);
    }
    if let Some(o) = &common.out {
        cfg.insert("out_dir", o.display());
    }
    for (k, v) in flags {
        if let Some(v) = v {
            cfg.insert(k, v);
        }
    }
    let seed = cfg.get_or("seed", 1u64)?;
    cfg.insert("seed", seed);
    Ok((cfg, seed))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate { common, model } => {
            let m = model.map(|m| match m {
                ModelKind::Lsh => "lsh".to_string(),
                ModelKind::Beta => "beta".to_string(),
                ModelKind::Lca => "lca".to_string(),
            });
            let (cfg, seed) = load(&common, &[("model", m)])?;
            commands::simulate::run(&cfg, seed)
        }
        Command::Fit { common, chains } => {
            let (cfg, seed) = load(&common, &[("chains", chains.map(|c| c.to_string()))])?;
            commands::fit::run(&cfg, seed)
        }
        Command::Predict { common, placement } => {
            let p = placement.map(|p| match p {
                PlacementArg::Gaussian => "gaussian".to_string(),
                PlacementArg::Peripheral => "peripheral".to_string(),
            });
            let (cfg, seed) = load(&common, &[("placement", p)])?;
            commands::predict::run(&cfg, seed)
        }
        Command::Theory { common } => {
            let (cfg, seed) = load(&common, &[])?;
            commands::theory::run(&cfg, seed)
        }
        Command::Summarize { file, csv, common } => {
            let (cfg, seed) = load(&common, &[("input", Some(file.display().to_string()))])?;
            commands::summarize::run(&cfg, seed, csv.as_deref())
        }
        Command::Init { common } => {
            let (cfg, seed) = load(&common, &[])?;
            commands::init::run(&cfg, seed)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lsh: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

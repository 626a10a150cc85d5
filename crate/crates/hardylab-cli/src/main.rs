//! Campaign runner CLI: run a config file or a built-in preset, list presets,
//! and manage the eigensystem cache.
//!
//! Exit codes: 0 all non-vacuous checks pass, 1 inequality violations,
//! 2 configuration errors, 3 numerical failures.

mod config;
mod output;
mod presets;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::Config;
use runner::RunError;

#[derive(Parser)]
#[command(
    name = "hardylab",
    version,
    about = "Boundary-decay and spectral bound verification campaigns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Override the output directory of every campaign.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Override the interior-node cap.
    #[arg(long, global = true)]
    node_cap: Option<usize>,
    /// Override the random-vector seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for independent eigensolves.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run the campaign described by a config file.
    Run { config: PathBuf },
    /// Run a built-in preset campaign.
    Preset { name: String },
    /// List the built-in presets.
    ListPresets,
    /// Eigensystem cache maintenance.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Precompute and store the full decomposition for a config.
    Build { config: PathBuf },
    /// Remove cached decompositions under the output directory.
    Clear,
}

const EXIT_VIOLATION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                RunError::Config(_) => ExitCode::from(EXIT_CONFIG),
                RunError::Numerical(_) => ExitCode::from(EXIT_NUMERICAL),
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, RunError> {
    match &cli.command {
        Command::Run { config } => {
            let cfg = load_config(config, &cli)?;
            run_one(&cfg, &cli)
        }
        Command::Preset { name } => {
            let preset = presets::find(name).ok_or_else(|| {
                RunError::Config(format!(
                    "unknown preset {name:?}; `hardylab list-presets` shows the catalogue"
                ))
            })?;
            let mut worst = ExitCode::SUCCESS;
            for text in preset.configs {
                let cfg =
                    apply_overrides(config::parse_config(text).map_err(RunError::Config)?, &cli);
                let code = run_one(&cfg, &cli)?;
                if code != ExitCode::SUCCESS {
                    worst = code;
                }
            }
            Ok(worst)
        }
        Command::ListPresets => {
            print!("{}", presets::listing());
            Ok(ExitCode::SUCCESS)
        }
        Command::Cache { action } => match action {
            CacheAction::Build { config } => {
                let cfg = load_config(config, &cli)?;
                let numerical = |e: hardylab::Error| RunError::Numerical(e.to_string());
                let confige = |e: hardylab::Error| RunError::Config(e.to_string());
                let domain = std::sync::Arc::new(
                    hardylab::geometry::build_domain(&cfg.domain.to_spec(), cfg.campaign.node_cap)
                        .map_err(confige)?,
                );
                let op = cfg
                    .operator
                    .to_spec()
                    .map_err(RunError::Config)?
                    .assemble(&domain, cfg.operator.c, cfg.operator.a)
                    .map_err(confige)?;
                let eig = hardylab::spectral::eigensolve(&op, hardylab::spectral::SolveCount::All)
                    .map_err(numerical)?;
                let dir = PathBuf::from(&cfg.output.dir).join("cache");
                let path = hardylab::spectral::cache::save(&eig, &dir).map_err(numerical)?;
                println!(
                    "cached {} ({} modes) at {}",
                    eig.op_ref,
                    eig.m,
                    path.display()
                );
                Ok(ExitCode::SUCCESS)
            }
            CacheAction::Clear => {
                let dir = cli
                    .out_dir
                    .clone()
                    .unwrap_or_else(|| PathBuf::from("out"))
                    .join("cache");
                let removed = hardylab::spectral::cache::clear(&dir)
                    .map_err(|e| RunError::Numerical(e.to_string()))?;
                println!(
                    "removed {removed} cached decompositions from {}",
                    dir.display()
                );
                Ok(ExitCode::SUCCESS)
            }
        },
    }
}

fn load_config(path: &PathBuf, cli: &Cli) -> Result<Config, RunError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    Ok(apply_overrides(
        config::parse_config(&text).map_err(RunError::Config)?,
        cli,
    ))
}

fn apply_overrides(mut cfg: Config, cli: &Cli) -> Config {
    if let Some(dir) = &cli.out_dir {
        cfg.output.dir = dir.display().to_string();
    }
    if let Some(cap) = cli.node_cap {
        cfg.campaign.node_cap = cap;
    }
    if let Some(seed) = cli.seed {
        cfg.campaign.seed = seed;
    }
    cfg
}

fn run_one(cfg: &Config, cli: &Cli) -> Result<ExitCode, RunError> {
    let out_dir = PathBuf::from(&cfg.output.dir);
    let outcome = runner::run_campaign(cfg, &out_dir, cli.jobs)?;
    let files = output::write_outputs(&outcome, &out_dir, &cfg.output.formats)
        .map_err(|e| RunError::Numerical(format!("writing outputs: {e}")))?;
    print!("{}", output::summary_text(&outcome));
    for f in files {
        println!("wrote {}", f.display());
    }
    Ok(if outcome.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VIOLATION)
    })
}

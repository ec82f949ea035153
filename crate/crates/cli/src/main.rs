//! `misocoal`: batch experiments for coalitional beamforming games.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use miso_coalition::config::{load_config, ComplexityConfig, FormationRunConfig, SweepConfig, ThresholdsConfig};
use miso_coalition::experiment::{cmd_complexity, cmd_formation, cmd_sweep, cmd_thresholds, sweep_csv};
use miso_coalition::Execution;

#[derive(Parser)]
#[command(name = "misocoal", version, about = "Coalitional beamforming experiments for the MISO interference channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weak/strong epsilon-core noise thresholds over an overhead grid.
    Thresholds(Common),
    /// One coalition formation run with its full message trace (JSON).
    Formation(Common),
    /// Monte-Carlo SNR sweep of rates, coalition counts and comparisons.
    Sweep(Common),
    /// Exact merge/split counts and iteration bounds.
    Complexity(Common),
}

#[derive(Args)]
struct Common {
    /// JSON config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the config's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads: 1 runs serially, 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Common {
    fn config_path(&self) -> Result<&PathBuf> {
        self.config.as_ref().context("--config <file> is required")
    }
}

fn run(cli: Cli) -> Result<()> {
    let (common, text) = match &cli.command {
        Command::Thresholds(c) => {
            let mut cfg: ThresholdsConfig = load_config(c.config_path()?)?;
            if let Some(seed) = c.seed {
                cfg.source.seed = seed;
            }
            let table = cmd_thresholds(&cfg, Execution::from_jobs(c.jobs))?;
            let text = match c.format.unwrap_or(Format::Csv) {
                Format::Csv => table.to_csv(),
                Format::Json => serde_json::to_string_pretty(&table)? + "\n",
            };
            (c, text)
        }
        Command::Formation(c) => {
            let mut cfg: FormationRunConfig = load_config(c.config_path()?)?;
            if let Some(seed) = c.seed {
                cfg.source.seed = seed;
            }
            if c.format == Some(Format::Csv) {
                bail!("formation traces are emitted as JSON only");
            }
            (c, serde_json::to_string_pretty(&cmd_formation(&cfg)?)? + "\n")
        }
        Command::Sweep(c) => {
            let mut cfg: SweepConfig = load_config(c.config_path()?)?;
            if let Some(seed) = c.seed {
                cfg.seed = seed;
            }
            let rows = cmd_sweep(&cfg, Execution::from_jobs(c.jobs))?;
            let text = match c.format.unwrap_or(Format::Csv) {
                Format::Csv => sweep_csv(&rows),
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
            };
            (c, text)
        }
        Command::Complexity(c) => {
            let cfg: ComplexityConfig = match &c.config {
                Some(path) => load_config(path)?,
                None => ComplexityConfig::default(),
            };
            let table = cmd_complexity(&cfg);
            let text = match c.format.unwrap_or(Format::Csv) {
                Format::Csv => table.to_csv(),
                Format::Json => serde_json::to_string_pretty(&table)? + "\n",
            };
            (c, text)
        }
    };
    match &common.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

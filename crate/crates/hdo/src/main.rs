use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand};
use hdo::service::AppState;
use hdo::suite::{run_cell, run_suite, RunOptions, Suite};
use hdo::{report, rmnk_file};
use hdo_core::orchestrator::RunConfig;
use hdo_core::problems::RmnkInstance;

#[derive(Parser)]
#[command(name = "hdo", version, about = "Interactive many-objective optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every cell of a suite and write records plus reports.
    Run {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: one per CPU).
        #[arg(long)]
        jobs: Option<usize>,
        /// Short schedule and five repeats per cell.
        #[arg(long)]
        smoke: bool,
        /// Overrides the suite's base seed.
        #[arg(long, env = "HO_SEED_BASE")]
        seed_base: Option<u64>,
    },
    /// Aggregate a results directory into summary CSVs.
    Summarize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the per-interaction objective activation counts.
    Heatmap {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one configuration and print or save its record.
    Single {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Generate a ρMNK instance file.
    Rmnk {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve sessions in which a person ranks the candidates.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Persist sessions here and restore them on startup.
        #[arg(long)]
        checkpoints: Option<PathBuf>,
    },
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run { suite, out, jobs, smoke, seed_base } => {
            let mut s = Suite::load(&suite)?;
            if let Some(base) = seed_base {
                s.seed_base = base;
            }
            let outcome = run_suite(&s, &out, &RunOptions { jobs, smoke })?;
            log::info!("{} runs completed, {} failed", outcome.completed, outcome.failures.len());
            if !outcome.failures.is_empty() {
                anyhow::bail!("{} runs failed; see {}", outcome.failures.len(), out.join("failures.csv").display());
            }
        }
        Command::Summarize { input, out } => report::summarize(&input, &out)?,
        Command::Heatmap { input, out } => report::heatmap(&input, &out)?,
        Command::Single { config, out, seed } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg: RunConfig = serde_json::from_str(&text).context("parsing run config")?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let json = serde_json::to_string_pretty(&run_cell(cfg, None)?)?;
            match out {
                Some(path) => std::fs::write(path, json)?,
                None => println!("{json}"),
            }
        }
        Command::Rmnk { m, n, k, rho, seed, out } => {
            rmnk_file::save(&RmnkInstance::generate(m, n, k, rho, seed)?, &out)?;
        }
        Command::Serve { host, port, checkpoints } => {
            let app = match checkpoints {
                Some(dir) => AppState::restore(dir)?,
                None => AppState::new(None)?,
            };
            tokio::runtime::Runtime::new()?.block_on(hdo::service::serve(&host, port, app))?;
        }
    }
    Ok(())
}

//! Experiment suites: named cells of run configurations, each repeated on
//! seeds derived from the suite's base seed.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, Context};
use hdo_core::orchestrator::{run, run_with_problem, Mode, RunConfig, RunRecord};
use hdo_core::problems::{Problem, RmnkInstance};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{report, rmnk_file};

pub const DEFAULT_REPEATS: usize = 20;
pub const SMOKE_REPEATS: usize = 5;

fn default_repeats() -> usize {
    DEFAULT_REPEATS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub seed_base: u64,
    pub cells: Vec<Cell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    /// Unique; also the directory name of the cell's records.
    pub name: String,
    /// Cells with the same key run on the same seeds. Defaults to the name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_key: Option<String>,
    /// Cell this one is compared against in the reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub baseline: Option<String>,
    /// Prebuilt ρMNK instance used instead of generating one from the spec.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rmnk_file: Option<PathBuf>,
    #[serde(flatten)]
    pub config: RunConfig,
}

impl Cell {
    pub fn seed_key(&self) -> &str {
        self.seed_key.as_deref().unwrap_or(&self.name)
    }
}

/// 64-bit FNV-1a; stable across platforms and releases, unlike std's hasher.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3))
}

impl Suite {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing suite {}", path.display()))
    }

    pub fn seed(&self, cell: &Cell, repeat: usize) -> u64 {
        self.seed_base.wrapping_add(fnv1a(format!("{}/{repeat}", cell.seed_key()).as_bytes()))
    }

    /// Reduced schedule and repeat count for quick checks.
    pub fn smoke(mut self) -> Self {
        self.repeats = SMOKE_REPEATS;
        for c in &mut self.cells {
            c.config = c.config.clone().smoke();
        }
        self
    }

    /// Structural checks. Individual run configurations are validated per run
    /// so that one bad cell does not stop the others.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.repeats == 0 {
            bail!("repeats must be positive");
        }
        let mut names = BTreeSet::new();
        for c in &self.cells {
            let ok = !c.name.is_empty()
                && c.name.chars().all(|ch| ch.is_ascii_alphanumeric() || "-_.".contains(ch))
                && !c.name.starts_with('.');
            if !ok {
                bail!("cell name {:?} must be non-empty and use only letters, digits, '-', '_' or '.'", c.name);
            }
            if !names.insert(c.name.as_str()) {
                bail!("duplicate cell name {:?}", c.name);
            }
        }
        for c in &self.cells {
            if let Some(b) = &c.baseline {
                if !names.contains(b.as_str()) {
                    bail!("cell {:?} names unknown baseline {b:?}", c.name);
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; defaults to the number of CPUs.
    pub jobs: Option<usize>,
    pub smoke: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Failure {
    pub schema: &'static str,
    pub cell: String,
    pub repeat: usize,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Timing<'a> {
    schema: &'static str,
    cell: &'a str,
    repeat: usize,
    seed: u64,
    seconds: f64,
}

#[derive(Debug, Default)]
pub struct SuiteOutcome {
    pub completed: usize,
    pub failures: Vec<Failure>,
}

pub fn record_path(out: &Path, cell: &str, repeat: usize) -> PathBuf {
    out.join("runs").join(cell).join(format!("run-{repeat:03}.json"))
}

/// Runs one configuration, on a prebuilt instance when given.
pub fn run_cell(config: RunConfig, instance: Option<&RmnkInstance>) -> hdo_core::Result<RunRecord> {
    match instance {
        Some(inst) => {
            if inst.num_objectives() != config.num_objectives() {
                return Err(hdo_core::Error::Dimension { expected: config.num_objectives(), got: inst.m });
            }
            run_with_problem(config, inst)
        }
        None => run(config),
    }
}

/// Near-optimal relevant objectives stop correlating with the ranks and get
/// swapped for irrelevant ones, so late masks can end up almost full.
fn note_mask_growth(cell: &str, repeat: usize, record: &RunRecord) {
    if record.mode != Mode::Detection {
        return;
    }
    if let Some(last) = record.interactions.last() {
        if last.active_after.len() + 1 >= record.m {
            log::info!(
                "cell {cell} repeat {repeat}: {} of {} objectives active after interaction {}",
                last.active_after.len(),
                record.m,
                last.index
            );
        }
    }
}

/// Runs every repeat of every cell, writes one record per run under
/// `out/runs/<cell>/`, then the aggregated reports.
///
/// Wall-clock times go to `timing.csv` so that the records themselves stay
/// byte-identical across reruns.
pub fn run_suite(suite: &Suite, out: &Path, opts: &RunOptions) -> anyhow::Result<SuiteOutcome> {
    let suite = if opts.smoke { suite.clone().smoke() } else { suite.clone() };
    suite.validate()?;
    fs::create_dir_all(out.join("runs")).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("suite.json"), serde_json::to_string_pretty(&suite)?)?;

    let mut instances: Vec<Result<Option<Arc<RmnkInstance>>, String>> = Vec::new();
    for c in &suite.cells {
        fs::create_dir_all(out.join("runs").join(&c.name))?;
        instances.push(match &c.rmnk_file {
            Some(p) => rmnk_file::load(p).map(|i| Some(Arc::new(i))).map_err(|e| e.to_string()),
            None => Ok(None),
        });
    }

    let jobs: Vec<(usize, usize)> =
        (0..suite.cells.len()).flat_map(|c| (0..suite.repeats).map(move |r| (c, r))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.unwrap_or(0)).build()?;
    let results: Vec<(usize, usize, u64, Result<f64, String>)> = pool.install(|| {
        jobs.par_iter()
            .map(|&(ci, r)| {
                let cell = &suite.cells[ci];
                let seed = suite.seed(cell, r);
                let mut cfg = cell.config.clone();
                cfg.seed = seed;
                let started = Instant::now();
                let outcome = instances[ci].clone().and_then(|inst| {
                    let record = run_cell(cfg, inst.as_deref()).map_err(|e| e.to_string())?;
                    note_mask_growth(&cell.name, r, &record);
                    let json = serde_json::to_string_pretty(&record).map_err(|e| e.to_string())?;
                    fs::write(record_path(out, &cell.name, r), json).map_err(|e| e.to_string())?;
                    Ok(started.elapsed().as_secs_f64())
                });
                if let Err(e) = &outcome {
                    log::warn!("cell {} repeat {r} failed: {e}", cell.name);
                }
                (ci, r, seed, outcome)
            })
            .collect()
    });

    let mut outcome = SuiteOutcome::default();
    let mut timing = csv::Writer::from_path(out.join("timing.csv"))?;
    for (ci, r, seed, res) in &results {
        let cell = &suite.cells[*ci].name;
        match res {
            Ok(seconds) => {
                outcome.completed += 1;
                timing.serialize(Timing { schema: "timing-v1", cell, repeat: *r, seed: *seed, seconds: *seconds })?;
            }
            Err(e) => outcome.failures.push(Failure {
                schema: "failures-v1",
                cell: cell.clone(),
                repeat: *r,
                error: e.clone(),
            }),
        }
    }
    timing.flush()?;
    let mut failures = csv::Writer::from_path(out.join("failures.csv"))?;
    if outcome.failures.is_empty() {
        failures.write_record(["schema", "cell", "repeat", "error"])?;
    }
    for f in &outcome.failures {
        failures.serialize(f)?;
    }
    failures.flush()?;

    report::write_reports(out)?;
    Ok(outcome)
}

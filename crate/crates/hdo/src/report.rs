//! Aggregated CSV reports over a results directory.
//!
//! Every CSV carries a `schema` column naming its layout version.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use hdo_core::orchestrator::RunRecord;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::suite::Suite;

/// All records of a results directory, by cell and repeat.
#[derive(Debug, Default)]
pub struct Results {
    pub suite: Option<Suite>,
    pub cells: BTreeMap<String, BTreeMap<usize, RunRecord>>,
}

impl Results {
    /// Reads `suite.json` (optional) and every `runs/<cell>/run-NNN.json`.
    /// Unreadable records are skipped with a warning.
    pub fn load(dir: &Path) -> anyhow::Result<Self> {
        let suite = match fs::read_to_string(dir.join("suite.json")) {
            Ok(text) => match serde_json::from_str(&text) {
                Ok(s) => Some(s),
                Err(e) => {
                    log::warn!("ignoring malformed suite.json: {e}");
                    None
                }
            },
            Err(_) => None,
        };
        let runs = dir.join("runs");
        let mut cells = BTreeMap::new();
        let entries = fs::read_dir(&runs).with_context(|| format!("reading {}", runs.display()))?;
        let mut cell_dirs: Vec<PathBuf> =
            entries.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.is_dir()).collect();
        cell_dirs.sort();
        for cell_dir in cell_dirs {
            let name = cell_dir.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
            let mut records = BTreeMap::new();
            for entry in fs::read_dir(&cell_dir)?.filter_map(|e| e.ok()) {
                let path = entry.path();
                let Some(repeat) = path
                    .file_name()
                    .and_then(|n| n.to_str())
                    .and_then(|n| n.strip_prefix("run-")?.strip_suffix(".json")?.parse::<usize>().ok())
                else {
                    continue;
                };
                let parsed = fs::read_to_string(&path)
                    .map_err(anyhow::Error::from)
                    .and_then(|t| serde_json::from_str::<RunRecord>(&t).map_err(anyhow::Error::from));
                match parsed {
                    Ok(r) => {
                        records.insert(repeat, r);
                    }
                    Err(e) => log::warn!("skipping {}: {e}", path.display()),
                }
            }
            cells.insert(name, records);
        }
        Ok(Self { suite, cells })
    }

    fn baseline_of(&self, cell: &str) -> Option<&str> {
        self.suite.as_ref()?.cells.iter().find(|c| c.name == cell)?.baseline.as_deref()
    }
}

/// Mean with a two-sided 95% Student-t interval; `None` bounds below two values.
pub fn t_interval(values: &[f64]) -> (f64, Option<(f64, f64)>) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, None);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("positive degrees of freedom").inverse_cdf(0.975);
    let half = t * (var / n as f64).sqrt();
    (mean, Some((mean - half, mean + half)))
}

fn mean_u64(values: impl Iterator<Item = u64>) -> Option<f64> {
    let (sum, n) = values.fold((0u128, 0u64), |(s, n), v| (s + u128::from(v), n + 1));
    (n > 0).then(|| sum as f64 / n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub schema: &'static str,
    pub cell: String,
    pub mode: String,
    pub variant: Option<String>,
    pub m: usize,
    pub runs: usize,
    pub mean_utility: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    /// Mean number of active objectives before the first interaction and after each.
    pub mean_active_trajectory: String,
    pub mean_evaluations: Option<f64>,
    pub mean_post_first_evaluations: Option<f64>,
    pub mean_post_first_relevant: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub schema: &'static str,
    pub cell: String,
    pub baseline: String,
    /// Repeats present in both cells.
    pub pairs: usize,
    /// Mean of `utility(cell) - utility(baseline)` over the pairs.
    pub mean_difference: Option<f64>,
    pub diff_ci_low: Option<f64>,
    pub diff_ci_high: Option<f64>,
    /// Post-first-interaction evaluations of the cell over the baseline's.
    pub evaluation_ratio: Option<f64>,
    /// Share of the cell's post-first-interaction evaluations on relevant objectives.
    pub relevant_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapRow {
    pub schema: &'static str,
    pub cell: String,
    /// 0 is the initial mask; `i` is the mask after interaction `i`.
    pub interaction: usize,
    /// 1-based.
    pub objective: usize,
    pub active_runs: usize,
    pub runs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub schema: &'static str,
    pub cell: String,
    pub interaction: usize,
    pub runs: usize,
    pub mean_active: f64,
    pub mean_best_so_far: Option<f64>,
}

fn final_utility(r: &RunRecord) -> Option<f64> {
    r.final_solution.as_ref()?.true_utility
}

pub fn summary_rows(results: &Results) -> Vec<SummaryRow> {
    results
        .cells
        .iter()
        .filter(|(_, runs)| !runs.is_empty())
        .map(|(cell, runs)| {
            let first = runs.values().next().expect("non-empty");
            let utilities: Vec<f64> = runs.values().filter_map(final_utility).collect();
            let (mean, ci) = t_interval(&utilities);
            let traj = trajectory(runs.values());
            SummaryRow {
                schema: "summary-v1",
                cell: cell.clone(),
                mode: first.mode.as_str().into(),
                variant: first.variant.clone(),
                m: first.m,
                runs: runs.len(),
                mean_utility: (!utilities.is_empty()).then_some(mean),
                ci_low: ci.map(|c| c.0),
                ci_high: ci.map(|c| c.1),
                mean_active_trajectory: traj.iter().map(|(_, a, _)| format!("{a}")).collect::<Vec<_>>().join(";"),
                mean_evaluations: mean_u64(runs.values().map(|r| r.evaluations.total())),
                mean_post_first_evaluations: mean_u64(
                    runs.values().filter_map(|r| r.post_first_interaction.map(|p| p.total)),
                ),
                mean_post_first_relevant: mean_u64(
                    runs.values().filter_map(|r| r.post_first_interaction.map(|p| p.relevant)),
                ),
            }
        })
        .collect()
}

/// Per column: number of runs reaching it, mean active count, mean best-so-far.
fn trajectory<'a>(runs: impl Iterator<Item = &'a RunRecord>) -> Vec<(usize, f64, Option<f64>)> {
    let mut cols: Vec<(usize, f64, f64, usize)> = Vec::new();
    for r in runs {
        for (j, mask) in r.mask_trajectory().iter().enumerate() {
            if cols.len() <= j {
                cols.push((0, 0.0, 0.0, 0));
            }
            cols[j].0 += 1;
            cols[j].1 += mask.len() as f64;
            let best = j.checked_sub(1).and_then(|i| r.interactions[i].best_so_far_utility);
            if let Some(b) = best {
                cols[j].2 += b;
                cols[j].3 += 1;
            }
        }
    }
    cols.into_iter().map(|(n, active, best, nb)| (n, active / n as f64, (nb > 0).then(|| best / nb as f64))).collect()
}

pub fn comparison_rows(results: &Results) -> Vec<ComparisonRow> {
    let mut rows = Vec::new();
    for (cell, runs) in &results.cells {
        let Some(base_name) = results.baseline_of(cell) else { continue };
        let Some(base) = results.cells.get(base_name) else { continue };
        let paired: Vec<(&RunRecord, &RunRecord)> =
            runs.iter().filter_map(|(r, rec)| base.get(r).map(|b| (rec, b))).collect();
        let diffs: Vec<f64> = paired.iter().filter_map(|(a, b)| Some(final_utility(a)? - final_utility(b)?)).collect();
        let (mean, ci) = t_interval(&diffs);
        let post = |r: &RunRecord| r.post_first_interaction.unwrap_or_default();
        let cell_post: u64 = paired.iter().map(|(a, _)| post(a).total).sum();
        let base_post: u64 = paired.iter().map(|(_, b)| post(b).total).sum();
        let cell_relevant: u64 = paired.iter().map(|(a, _)| post(a).relevant).sum();
        rows.push(ComparisonRow {
            schema: "comparison-v1",
            cell: cell.clone(),
            baseline: base_name.to_string(),
            pairs: paired.len(),
            mean_difference: (!diffs.is_empty()).then_some(mean),
            diff_ci_low: ci.map(|c| c.0),
            diff_ci_high: ci.map(|c| c.1),
            evaluation_ratio: (base_post > 0).then(|| cell_post as f64 / base_post as f64),
            relevant_share: (cell_post > 0).then(|| cell_relevant as f64 / cell_post as f64),
        });
    }
    rows
}

/// Long-format activation counts: one row per (cell, interaction, objective).
pub fn heatmap_rows(results: &Results) -> Vec<HeatmapRow> {
    let mut rows = Vec::new();
    for (cell, runs) in &results.cells {
        let Some(m) = runs.values().next().map(|r| r.m) else { continue };
        let trajectories: Vec<Vec<Vec<usize>>> = runs.values().map(RunRecord::mask_trajectory).collect();
        let columns = trajectories.iter().map(Vec::len).max().unwrap_or(0);
        for j in 0..columns {
            let reaching: Vec<&Vec<usize>> = trajectories.iter().filter_map(|t| t.get(j)).collect();
            for objective in 1..=m {
                rows.push(HeatmapRow {
                    schema: "heatmap-v1",
                    cell: cell.clone(),
                    interaction: j,
                    objective,
                    active_runs: reaching.iter().filter(|mask| mask.contains(&objective)).count(),
                    runs: reaching.len(),
                });
            }
        }
    }
    rows
}

pub fn trajectory_rows(results: &Results) -> Vec<TrajectoryRow> {
    let mut rows = Vec::new();
    for (cell, runs) in &results.cells {
        for (j, (n, active, best)) in trajectory(runs.values()).into_iter().enumerate() {
            rows.push(TrajectoryRow {
                schema: "trajectory-v1",
                cell: cell.clone(),
                interaction: j,
                runs: n,
                mean_active: active,
                mean_best_so_far: best,
            });
        }
    }
    rows
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// `<stem>.<suffix>.csv` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("summary");
    path.with_file_name(format!("{stem}.{suffix}.csv"))
}

const SUMMARY_HEADER: &[&str] = &[
    "schema",
    "cell",
    "mode",
    "variant",
    "m",
    "runs",
    "mean_utility",
    "ci_low",
    "ci_high",
    "mean_active_trajectory",
    "mean_evaluations",
    "mean_post_first_evaluations",
    "mean_post_first_relevant",
];
const COMPARISON_HEADER: &[&str] = &[
    "schema",
    "cell",
    "baseline",
    "pairs",
    "mean_difference",
    "diff_ci_low",
    "diff_ci_high",
    "evaluation_ratio",
    "relevant_share",
];
const HEATMAP_HEADER: &[&str] = &["schema", "cell", "interaction", "objective", "active_runs", "runs"];
const TRAJECTORY_HEADER: &[&str] = &["schema", "cell", "interaction", "runs", "mean_active", "mean_best_so_far"];

/// Writes the summary to `out`, plus `<stem>.comparisons.csv` and the
/// plot-ready `<stem>.trajectory.csv` beside it.
pub fn summarize(dir: &Path, out: &Path) -> anyhow::Result<()> {
    let results = Results::load(dir)?;
    write_csv(out, &summary_rows(&results), SUMMARY_HEADER)?;
    write_csv(&sibling(out, "comparisons"), &comparison_rows(&results), COMPARISON_HEADER)?;
    write_csv(&sibling(out, "trajectory"), &trajectory_rows(&results), TRAJECTORY_HEADER)
}

pub fn heatmap(dir: &Path, out: &Path) -> anyhow::Result<()> {
    let results = Results::load(dir)?;
    write_csv(out, &heatmap_rows(&results), HEATMAP_HEADER)
}

/// The aggregate files written at the end of a suite run.
pub fn write_reports(dir: &Path) -> anyhow::Result<()> {
    summarize(dir, &dir.join("summary.csv"))?;
    heatmap(dir, &dir.join("heatmap.csv"))
}

mod common;

use std::fs;

use common::tiny;
use hdo::report::{comparison_rows, heatmap_rows, summary_rows, t_interval, trajectory_rows, Results};
use hdo::suite::{record_path, run_suite, Cell, RunOptions, Suite};
use hdo_core::orchestrator::Mode;

#[test]
fn t_interval_matches_table_values() {
    // t(0.975, 4) = 2.776445 from a printed table; s = sqrt(2.5)
    let (mean, ci) = t_interval(&[1.0, 2.0, 3.0, 4.0, 5.0]);
    let half = 2.776445 * (2.5f64 / 5.0).sqrt();
    let (lo, hi) = ci.unwrap();
    assert!((mean - 3.0).abs() < 1e-12);
    assert!((lo - (3.0 - half)).abs() < 1e-5);
    assert!((hi - (3.0 + half)).abs() < 1e-5);

    // t(0.975, 1) = 12.7062
    let (_, ci) = t_interval(&[0.0, 2.0]);
    assert!((ci.unwrap().1 - (1.0 + 12.7062)).abs() < 1e-3);

    assert_eq!(t_interval(&[4.0, 4.0, 4.0]), (4.0, Some((4.0, 4.0))));
    assert_eq!(t_interval(&[4.0]), (4.0, None));
    assert!(t_interval(&[]).0.is_nan());
}

fn results_dir() -> tempfile::TempDir {
    let det = Cell {
        name: "detect".into(),
        seed_key: Some("k".into()),
        baseline: Some("learning".into()),
        rmnk_file: None,
        config: tiny(Mode::Detection, 3),
    };
    let mut ol = tiny(Mode::OnlyLearning, 3);
    ol.initial_active = Some(vec![1, 2, 3, 4, 5]);
    let base =
        Cell { name: "learning".into(), seed_key: Some("k".into()), baseline: None, rmnk_file: None, config: ol };
    let suite = Suite { repeats: 4, seed_base: 3, cells: vec![det, base] };
    let dir = tempfile::tempdir().unwrap();
    run_suite(&suite, dir.path(), &RunOptions::default()).unwrap();
    dir
}

#[test]
fn summaries_agree_with_the_records() {
    let dir = results_dir();
    let results = Results::load(dir.path()).unwrap();
    let rows = summary_rows(&results);
    assert_eq!(rows.len(), 2);
    for row in &rows {
        let runs = &results.cells[&row.cell];
        assert_eq!(row.runs, 4);
        let utilities: Vec<f64> =
            runs.values().map(|r| r.final_solution.as_ref().unwrap().true_utility.unwrap()).collect();
        let mean = utilities.iter().sum::<f64>() / 4.0;
        assert!((row.mean_utility.unwrap() - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        assert!(row.ci_low.unwrap() <= mean && mean <= row.ci_high.unwrap());
        let evals = runs.values().map(|r| r.evaluations.total() as f64).sum::<f64>() / 4.0;
        assert_eq!(row.mean_evaluations, Some(evals));
        assert_eq!(row.mean_active_trajectory.split(';').count(), 4);
    }
    let learning = rows.iter().find(|r| r.cell == "learning").unwrap();
    assert_eq!(learning.mean_active_trajectory, "5;5;5;5");
}

#[test]
fn comparisons_pair_by_repeat() {
    let dir = results_dir();
    let results = Results::load(dir.path()).unwrap();
    let rows = comparison_rows(&results);
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!((row.cell.as_str(), row.baseline.as_str(), row.pairs), ("detect", "learning", 4));
    let (det, base) = (&results.cells["detect"], &results.cells["learning"]);
    let post = |r: &hdo_core::orchestrator::RunRecord| r.post_first_interaction.unwrap();
    let num: u64 = det.values().map(|r| post(r).total).sum();
    let den: u64 = base.values().map(|r| post(r).total).sum();
    let rel: u64 = det.values().map(|r| post(r).relevant).sum();
    assert_eq!(row.evaluation_ratio, Some(num as f64 / den as f64));
    assert_eq!(row.relevant_share, Some(rel as f64 / num as f64));
    let diffs: Vec<f64> = (0..4)
        .map(|i| {
            det[&i].final_solution.as_ref().unwrap().true_utility.unwrap()
                - base[&i].final_solution.as_ref().unwrap().true_utility.unwrap()
        })
        .collect();
    assert_eq!(row.mean_difference, Some(t_interval(&diffs).0));
}

#[test]
fn heatmap_counts_masks_per_interaction() {
    let dir = results_dir();
    let results = Results::load(dir.path()).unwrap();
    let rows = heatmap_rows(&results);
    // 2 cells x 4 columns x 5 objectives
    assert_eq!(rows.len(), 40);
    for row in rows.iter().filter(|r| r.cell == "detect") {
        let expected = results.cells["detect"]
            .values()
            .filter(|r| r.mask_trajectory()[row.interaction].contains(&row.objective))
            .count();
        assert_eq!(row.active_runs, expected);
        assert_eq!(row.runs, 4);
        if row.interaction == 0 {
            // threshold detection starts with every objective active
            assert_eq!(row.active_runs, 4);
        }
    }
    for j in 0..4 {
        let column: usize =
            rows.iter().filter(|r| r.cell == "detect" && r.interaction == j).map(|r| r.active_runs).sum();
        let masks: usize = results.cells["detect"].values().map(|r| r.mask_trajectory()[j].len()).sum();
        assert_eq!(column, masks);
    }
    assert_eq!(trajectory_rows(&results).len(), 8);
}

#[test]
fn identical_runs_give_a_zero_width_interval() {
    let dir = results_dir();
    let src = record_path(dir.path(), "learning", 0);
    let copy = dir.path().join("runs").join("twins");
    fs::create_dir_all(&copy).unwrap();
    for r in 0..3 {
        fs::copy(&src, copy.join(format!("run-{r:03}.json"))).unwrap();
    }
    let results = Results::load(dir.path()).unwrap();
    let row = summary_rows(&results).into_iter().find(|r| r.cell == "twins").unwrap();
    assert_eq!(row.ci_low, row.ci_high);
    assert_eq!(row.ci_low, row.mean_utility);
}

#[test]
fn corrupt_records_are_skipped() {
    let dir = results_dir();
    fs::write(record_path(dir.path(), "detect", 1), "{ truncated").unwrap();
    let results = Results::load(dir.path()).unwrap();
    assert_eq!(results.cells["detect"].len(), 3);
    hdo::report::summarize(dir.path(), &dir.path().join("again.csv")).unwrap();
    let text = fs::read_to_string(dir.path().join("again.csv")).unwrap();
    assert!(text.lines().next().unwrap().starts_with("schema,cell,mode"));
    assert!(dir.path().join("again.comparisons.csv").exists());
}

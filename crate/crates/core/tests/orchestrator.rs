use std::cell::RefCell;

use hdo_core::detection::{DetectionConfig, Method, Policy};
use hdo_core::mdm::{mdm_rank, UtilityFunction, UtilityKind};
use hdo_core::moea::Ranking;
use hdo_core::orchestrator::{run, run_with_problem, select_examples, ExampleSource, Mode, Run, RunConfig, Status};
use hdo_core::problems::{DtlzVariant, Encoding, Problem, ProblemInstance, ProblemSpec};
use hdo_core::{Decision, Individual, RelevantSet, Result};

/// Counts every call that reaches the underlying problem.
struct Counting {
    inner: ProblemInstance,
    calls: RefCell<Vec<u64>>,
}

impl Counting {
    fn new(spec: &ProblemSpec) -> Self {
        let inner = spec.instantiate().unwrap();
        let m = inner.num_objectives();
        Self { inner, calls: RefCell::new(vec![0; m]) }
    }

    fn total(&self) -> u64 {
        self.calls.borrow().iter().sum()
    }
}

impl Problem for Counting {
    fn num_objectives(&self) -> usize {
        self.inner.num_objectives()
    }
    fn encoding(&self) -> Encoding {
        self.inner.encoding()
    }
    fn evaluate(&self, x: &Decision, objective: usize) -> Result<f64> {
        self.calls.borrow_mut()[objective] += 1;
        self.inner.evaluate(x, objective)
    }
}

fn uf(kind: UtilityKind, c: &[usize]) -> UtilityFunction {
    UtilityFunction::quadratic(kind, RelevantSet::new(c.to_vec()).unwrap()).unwrap()
}

fn small(spec: ProblemSpec, mode: Mode, interactions: usize) -> RunConfig {
    let mut cfg = RunConfig::new(spec, Some(uf(UtilityKind::Uf1, &[0, 3])), mode);
    cfg.nsga2.population_size = 30;
    cfg.nsga2.offspring_per_generation = 30;
    cfg.total_generations = 60;
    cfg.gen_first = 20;
    cfg.gen_between = 8;
    cfg.interactions = interactions;
    cfg
}

fn dtlz(variant: DtlzVariant, m: usize) -> ProblemSpec {
    ProblemSpec::Dtlz { variant, m, n: None }
}

fn detection(method: Method, policy: Policy) -> Option<DetectionConfig> {
    Some(DetectionConfig::new(method, policy).unwrap())
}

#[test]
fn accounting_identity_is_exact() {
    let variants = [
        (Mode::Golden, None),
        (Mode::OnlyLearning, None),
        (Mode::Detection, detection(Method::Univariate, Policy::Threshold(0.3))),
        (Mode::Detection, detection(Method::Univariate, Policy::FixedK(3))),
        (Mode::Detection, detection(Method::Rfe, Policy::Threshold(0.05))),
    ];
    for (mode, det) in variants {
        for seed in 0..3 {
            let spec = dtlz(DtlzVariant::Dtlz2, 8);
            let mut cfg = small(spec.clone(), mode, 4);
            cfg.detection = det.clone();
            cfg.seed = seed;
            let problem = Counting::new(&spec);
            let rec = run_with_problem(cfg.clone(), &problem).unwrap();
            let ev = &rec.evaluations;
            assert_eq!(problem.total(), ev.total() + rec.reporting_evaluations, "{mode:?} seed {seed}");
            assert_eq!(ev.relevant_total + ev.irrelevant_total, ev.total());
            assert_eq!(rec.charges.total(), ev.total());
            for (i, (&counted, &charged)) in problem.calls.borrow().iter().zip(&ev.per_objective).enumerate() {
                assert!(counted >= charged && counted - charged <= 1, "objective {i}");
            }
            // each generation charges one evaluation per offspring and active objective
            let from_segments: u64 = rec
                .segments
                .iter()
                .map(|s| (s.generations * cfg.nsga2.offspring_per_generation * s.active.len()) as u64)
                .sum();
            assert_eq!(from_segments, rec.charges.generations);
            assert_eq!(rec.segments.iter().map(|s| s.evaluations).sum::<u64>(), rec.charges.generations);
        }
    }
}

#[test]
fn schedule_segments_cover_all_generations() {
    let cfg = small(dtlz(DtlzVariant::Dtlz2, 6), Mode::OnlyLearning, 4);
    let rec = run(cfg.clone()).unwrap();
    let gens: Vec<usize> = rec.segments.iter().map(|s| s.generations).collect();
    assert_eq!(gens, vec![20, 8, 8, 8, 16]);
    assert_eq!(gens.iter().sum::<usize>(), cfg.total_generations);
    let golden = run(small(dtlz(DtlzVariant::Dtlz2, 6), Mode::Golden, 4)).unwrap();
    assert_eq!(golden.segments.iter().map(|s| s.generations).collect::<Vec<_>>(), vec![20, 40]);
}

#[test]
fn first_interaction_charges_the_missing_objectives() {
    let mut cfg = small(dtlz(DtlzVariant::Dtlz1, 20), Mode::OnlyLearning, 1);
    cfg.initial_active = Some(vec![2, 4]);
    let rec = run(cfg).unwrap();
    assert_eq!(rec.charges.interactions, 5 * 18);
    assert_eq!(rec.charges.initial, 30 * 2);
    assert_eq!(rec.charges.reevaluation, 0);
}

#[test]
fn runs_are_byte_identical_under_a_fixed_seed() {
    let mut cfg = small(ProblemSpec::Rmnk { m: 4, n: None, k: 2, rho: 0.2, seed: 5 }, Mode::Detection, 3);
    cfg.utility = Some(uf(UtilityKind::Uf2, &[0, 1]));
    cfg.detection = detection(Method::Rfe, Policy::FixedK(2));
    cfg.seed = 42;
    let outputs: Vec<String> = (0..3).map(|_| serde_json::to_string(&run(cfg.clone()).unwrap()).unwrap()).collect();
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
    cfg.seed = 43;
    assert_ne!(serde_json::to_string(&run(cfg).unwrap()).unwrap(), outputs[0]);
}

#[test]
fn tau_one_detection_equals_only_learning() {
    for seed in 0..4 {
        let mut base = small(dtlz(DtlzVariant::Dtlz2, 6), Mode::OnlyLearning, 3);
        base.seed = seed;
        base.initial_active = Some((1..=6).collect());
        let mut det = base.clone();
        det.mode = Mode::Detection;
        det.initial_active = None;
        det.detection = detection(Method::Univariate, Policy::Threshold(1.0));
        let a = run(base).unwrap();
        let b = run(det).unwrap();
        assert_eq!(a.mask_trajectory(), b.mask_trajectory());
        assert_eq!(a.final_solution, b.final_solution);
        assert_eq!(a.evaluations, b.evaluations);
    }
}

#[test]
fn only_learning_never_changes_the_mask() {
    let rec = run(small(dtlz(DtlzVariant::Dtlz7, 6), Mode::OnlyLearning, 5)).unwrap();
    assert!(rec.mask_trajectory().iter().all(|m| m == &vec![2, 4]));
}

#[test]
fn mask_floor_holds_in_every_detection_variant() {
    for (method, policy) in [
        (Method::Univariate, Policy::Threshold(1e-9)),
        (Method::Univariate, Policy::FixedK(2)),
        (Method::Rfe, Policy::Threshold(1.0)),
        (Method::Rfe, Policy::FixedK(2)),
    ] {
        let mut cfg = small(dtlz(DtlzVariant::Dtlz1, 6), Mode::Detection, 3);
        cfg.detection = detection(method, policy);
        let rec = run(cfg).unwrap();
        assert!(rec.mask_trajectory().iter().all(|m| m.len() >= 2), "{method:?} {policy:?}");
    }
}

#[test]
fn best_so_far_never_increases() {
    let mut cfg = small(dtlz(DtlzVariant::Dtlz2, 6), Mode::Detection, 5);
    cfg.detection = detection(Method::Univariate, Policy::Threshold(0.1));
    let rec = run(cfg.clone()).unwrap();
    let uf = cfg.utility.unwrap();
    let mut best = f64::INFINITY;
    for i in &rec.interactions {
        for v in &i.shown {
            best = best.min(uf.utility(&hdo_core::ObjectiveVector::new(v.clone()).unwrap()).unwrap());
        }
        assert_eq!(i.best_so_far_utility, Some(best));
    }
}

#[test]
fn elitist_selection_keeps_the_previous_favourite() {
    let inds: Vec<Individual> = (0..6).map(|i| Individual::new(Decision::Real(vec![i as f64]), 2)).collect();
    let ranking = Ranking { front: vec![0, 0, 1, 1, 2, 2], key: vec![0.0; 6] };
    let picks = select_examples(&inds, &ranking, 3, None);
    assert_eq!(picks, vec![ExampleSource::Population(0), ExampleSource::Population(1), ExampleSource::Population(2)]);

    let present = inds[1].clone();
    assert_eq!(select_examples(&inds, &ranking, 3, Some(&present)), picks);

    let absent = Individual::new(Decision::Real(vec![99.0]), 2);
    let picks = select_examples(&inds, &ranking, 3, Some(&absent));
    assert_eq!(picks.len(), 3);
    assert_eq!(picks[2], ExampleSource::PreviousBest);
}

#[test]
fn previous_favourite_is_shown_again() {
    let rec = run(small(dtlz(DtlzVariant::Dtlz2, 6), Mode::OnlyLearning, 4)).unwrap();
    for w in rec.interactions.windows(2) {
        let top = w[0].ranks.iter().enumerate().min_by_key(|(i, r)| (**r, *i)).unwrap().0;
        assert!(w[1].shown.contains(&w[0].shown[top]));
    }
}

#[test]
fn a_human_can_drive_the_run() {
    let spec = dtlz(DtlzVariant::Dtlz2, 4);
    let mut cfg = small(spec, Mode::Detection, 2);
    let hidden = cfg.utility.take().unwrap();
    cfg.detection = detection(Method::Univariate, Policy::FixedK(2));
    let mut r = Run::new(cfg).unwrap();
    assert_eq!(r.status(), Status::NotStarted);
    let mut status = r.advance().unwrap();
    let mut rounds = 0;
    while let Status::AwaitingRanking { interaction } = status {
        rounds += 1;
        assert_eq!(interaction, rounds);
        let shown = r.pending().unwrap();
        status = r.submit_ranking(&mdm_rank(&shown, &hidden).unwrap()).unwrap();
    }
    assert_eq!(rounds, 2);
    let rec = r.into_record();
    assert!(rec.relevant.is_empty());
    let fin = rec.final_solution.unwrap();
    assert_eq!(fin.true_utility, None);
    assert_eq!(fin.objectives.len(), 4);
}

#[test]
fn golden_optimizes_only_relevant_objectives() {
    let rec = run(small(dtlz(DtlzVariant::Dtlz1, 8), Mode::Golden, 1)).unwrap();
    assert_eq!(rec.evaluations.irrelevant_total, 0);
    assert!(rec.segments.iter().all(|s| s.active == vec![1, 4]));
    assert_eq!(rec.reporting_evaluations, 6);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = small(dtlz(DtlzVariant::Dtlz2, 4), Mode::Detection, 2);
    assert!(Run::new(cfg.clone()).is_err());
    cfg.detection = detection(Method::Univariate, Policy::FixedK(6));
    assert!(Run::new(cfg.clone()).is_err());
    cfg.detection = detection(Method::Univariate, Policy::FixedK(2));
    cfg.initial_active = Some(vec![3]);
    assert!(Run::new(cfg.clone()).is_err());
    cfg.initial_active = Some(vec![0, 1]);
    assert!(Run::new(cfg.clone()).is_err());
    cfg.initial_active = None;
    cfg.examples_per_interaction = 1;
    assert!(Run::new(cfg).is_err());
}

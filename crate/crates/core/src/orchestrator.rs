//! The interactive driver: NSGA-II phases separated by decision-maker
//! interactions, with the active objectives optionally re-selected after each
//! interaction.
//!
//! [`Run`] is a resumable state machine. [`Run::advance`] evolves until the
//! next interaction (or the end), [`Run::submit_ranking`] consumes the
//! decision maker's ranks and evolves on. [`run`] drives it with the machine
//! decision maker; a human can drive the same machine through a service.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::detection::{detect, DetectionConfig, Method, Policy};
use crate::error::{Error, Result};
use crate::learning::{fit_utility, LearningConfig, RankedBatch, UtilityModel};
use crate::mdm::{mdm_rank, UtilityFunction};
use crate::moea::{EvalContext, Nsga2, Population, Ranking, SecondaryCriterion};
use crate::problems::{Problem, ProblemInstance, ProblemSpec};
use crate::types::{ActiveMask, Decision, EvalCounter, Individual, ObjectiveVector, RelevantSet};

/// Identifier written into serialized run records.
pub const RUN_RECORD_FORMAT: &str = "run-record-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// True utility, relevant objectives only, no interactions.
    Golden,
    /// Learned utility, fixed active objectives.
    OnlyLearning,
    /// Learned utility, active objectives re-selected after each interaction.
    Detection,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Golden => "golden",
            Mode::OnlyLearning => "only_learning",
            Mode::Detection => "detection",
        }
    }
}

fn default_interactions() -> usize {
    1
}
fn default_examples() -> usize {
    5
}
fn default_gen_first() -> usize {
    200
}
fn default_gen_between() -> usize {
    30
}
fn default_total() -> usize {
    500
}
fn default_true() -> bool {
    true
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    /// The machine decision maker's utility. Absent when a human ranks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utility: Option<UtilityFunction>,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detection: Option<DetectionConfig>,
    #[serde(default = "default_interactions")]
    pub interactions: usize,
    #[serde(default = "default_examples")]
    pub examples_per_interaction: usize,
    /// Generations before the first interaction.
    #[serde(default = "default_gen_first")]
    pub gen_first: usize,
    /// Generations between consecutive interactions.
    #[serde(default = "default_gen_between")]
    pub gen_between: usize,
    #[serde(default = "default_total")]
    pub total_generations: usize,
    /// 1-based indices of the initially active objectives.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_active: Option<Vec<usize>>,
    /// Always show the previous interaction's top-ranked solution again.
    #[serde(default = "default_true")]
    pub elitist_examples: bool,
    #[serde(default)]
    pub nsga2: Nsga2,
    #[serde(default)]
    pub learning: LearningConfig,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Full-scale schedule defaults around a problem, utility and mode.
    pub fn new(problem: ProblemSpec, utility: Option<UtilityFunction>, mode: Mode) -> Self {
        Self {
            problem,
            utility,
            mode,
            detection: None,
            interactions: default_interactions(),
            examples_per_interaction: default_examples(),
            gen_first: default_gen_first(),
            gen_between: default_gen_between(),
            total_generations: default_total(),
            initial_active: None,
            elitist_examples: true,
            nsga2: Nsga2::default(),
            learning: LearningConfig::default(),
            seed: 0,
        }
    }

    /// Reduced schedule for quick runs: 150 generations, first interaction
    /// after 60, then every 15.
    pub fn smoke(mut self) -> Self {
        self.total_generations = 150;
        self.gen_first = 60;
        self.gen_between = 15;
        self
    }

    pub fn num_objectives(&self) -> usize {
        self.problem.num_objectives()
    }

    /// Generations left after the last interaction.
    pub fn trailing_generations(&self) -> Result<usize> {
        let used = match self.mode {
            Mode::Golden => self.gen_first,
            _ => self.gen_first + self.gen_between * self.interactions.saturating_sub(1),
        };
        self.total_generations.checked_sub(used).ok_or_else(|| {
            Error::Config(alloc::format!(
                "schedule needs {used} generations but only {} are available",
                self.total_generations
            ))
        })
    }

    pub fn relevant_set(&self) -> RelevantSet {
        self.utility.as_ref().map_or_else(RelevantSet::empty, |u| u.relevant().clone())
    }

    /// Initial mask: explicit if given; otherwise the relevant objectives in
    /// golden mode, all objectives for threshold detection, and objectives
    /// 2 and 4 (one relevant, one irrelevant under the default utilities)
    /// for fixed-size runs.
    pub fn initial_mask(&self) -> Result<ActiveMask> {
        let m = self.num_objectives();
        if let Some(active) = &self.initial_active {
            let zero_based = active
                .iter()
                .map(|&i| i.checked_sub(1).ok_or_else(|| Error::Config("objectives are numbered from 1".into())))
                .collect::<Result<Vec<_>>>()?;
            return ActiveMask::from_indices(m, &zero_based);
        }
        match self.mode {
            Mode::Golden => {
                let uf = self.utility.as_ref().ok_or_else(|| Error::Config("golden mode needs a utility".into()))?;
                uf.relevant().to_mask(m)
            }
            Mode::Detection if matches!(self.detection.as_ref().map(|d| d.policy), Some(Policy::Threshold(_))) => {
                Ok(ActiveMask::all(m))
            }
            _ if m >= 4 => ActiveMask::from_indices(m, &[1, 3]),
            _ => Ok(ActiveMask::all(m)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.num_objectives();
        self.problem.bounds()?;
        if let Some(uf) = &self.utility {
            uf.relevant().validate(m)?;
        }
        match self.mode {
            Mode::Golden if self.utility.is_none() => return Err(Error::Config("golden mode needs a utility".into())),
            Mode::Detection => {
                let det = self
                    .detection
                    .as_ref()
                    .ok_or_else(|| Error::Config("detection mode needs a detection config".into()))?;
                det.validate()?;
                if let Policy::FixedK(k) = det.policy {
                    if k > m {
                        return Err(Error::Config(alloc::format!("k = {k} exceeds m = {m}")));
                    }
                }
                if det.method == Method::Univariate && self.examples_per_interaction < 3 {
                    return Err(Error::Config("univariate detection needs at least 3 examples".into()));
                }
            }
            _ => {}
        }
        if self.mode != Mode::Golden && self.interactions == 0 {
            return Err(Error::Config("learning modes need at least one interaction".into()));
        }
        if self.examples_per_interaction < 2 || self.examples_per_interaction > self.nsga2.population_size {
            return Err(Error::Config(alloc::format!(
                "examples per interaction must lie in [2, {}]",
                self.nsga2.population_size
            )));
        }
        if self.nsga2.population_size < 2 || self.nsga2.offspring_per_generation == 0 {
            return Err(Error::Config("population and offspring sizes must be positive".into()));
        }
        self.trailing_generations()?;
        self.initial_mask()?.check_floor()?;
        Ok(())
    }
}

/// One generational segment of a run, for evaluation accounting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub generations: usize,
    /// 1-based active objectives during the segment.
    pub active: Vec<usize>,
    pub evaluations: u64,
}

/// Objective evaluations by phase. Sums to the counter total.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeBreakdown {
    pub initial: u64,
    pub generations: u64,
    pub interactions: u64,
    pub reevaluation: u64,
}

impl ChargeBreakdown {
    pub fn total(&self) -> u64 {
        self.initial + self.generations + self.interactions + self.reevaluation
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalSplit {
    pub total: u64,
    pub relevant: u64,
    pub irrelevant: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionRecord {
    /// 1-based interaction number.
    pub index: usize,
    /// Full objective vectors shown to the decision maker.
    pub shown: Vec<Vec<f64>>,
    pub ranks: Vec<u32>,
    pub active_before: Vec<usize>,
    pub active_after: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contributions: Option<Vec<Option<f64>>>,
    /// Lowest true utility among all solutions shown so far.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub best_so_far_utility: Option<f64>,
    pub model_constant: bool,
    pub training_pair_error: f64,
    /// Counter total once this interaction has been fully processed.
    pub evaluations_total: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalSolution {
    pub decision: Decision,
    pub objectives: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub true_utility: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub format: String,
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub seed: u64,
    pub m: usize,
    /// 1-based relevant objectives (empty when unknown).
    pub relevant: Vec<usize>,
    pub initial_active: Vec<usize>,
    pub interactions: Vec<InteractionRecord>,
    pub segments: Vec<SegmentRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_solution: Option<FinalSolution>,
    pub evaluations: EvalCounter,
    pub charges: ChargeBreakdown,
    /// Evaluations charged after the first interaction's ranking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub post_first_interaction: Option<EvalSplit>,
    /// Uncharged evaluations made only to report the final solution.
    pub reporting_evaluations: u64,
}

impl RunRecord {
    /// Active 1-based objectives after each interaction, starting with the
    /// initial mask.
    pub fn mask_trajectory(&self) -> Vec<Vec<usize>> {
        core::iter::once(self.initial_active.clone())
            .chain(self.interactions.iter().map(|i| i.active_after.clone()))
            .collect()
    }
}

/// Where an example shown to the decision maker comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleSource {
    Population(usize),
    PreviousBest,
}

/// The `n` best individuals by (front, criterion). With `previous_best` set
/// and absent from that selection, it replaces the last pick.
pub fn select_examples(
    pop: &[Individual],
    ranking: &Ranking,
    n: usize,
    previous_best: Option<&Individual>,
) -> Vec<ExampleSource> {
    let mut picks: Vec<ExampleSource> = ranking.order().into_iter().take(n).map(ExampleSource::Population).collect();
    if let Some(best) = previous_best {
        let present = picks.iter().any(|s| match s {
            ExampleSource::Population(i) => pop[*i].x == best.x,
            ExampleSource::PreviousBest => true,
        });
        if !present && !picks.is_empty() {
            *picks.last_mut().expect("non-empty") = ExampleSource::PreviousBest;
        }
    }
    picks
}

/// Where a run currently stands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum Status {
    NotStarted,
    AwaitingRanking { interaction: usize },
    Finished,
}

enum Stage {
    NotStarted,
    Awaiting { interaction: usize, shown: Vec<Individual> },
    Finished,
}

/// A run in progress.
pub struct Run<P: Problem = ProblemInstance> {
    cfg: RunConfig,
    problem: P,
    relevant: RelevantSet,
    rng: ChaCha8Rng,
    pop: Population,
    mask: ActiveMask,
    counter: EvalCounter,
    archive: Vec<RankedBatch>,
    criterion: SecondaryCriterion,
    previous_best: Option<Individual>,
    best_so_far: Option<f64>,
    counter_at_first: Option<EvalCounter>,
    stage: Stage,
    record: RunRecord,
}

impl Run<ProblemInstance> {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let problem = cfg.problem.instantiate()?;
        Self::with_problem(cfg, problem)
    }
}

impl<P: Problem> Run<P> {
    /// Runs `cfg` on an explicit problem instance (which must match the spec's
    /// objective count).
    pub fn with_problem(cfg: RunConfig, problem: P) -> Result<Self> {
        cfg.validate()?;
        let m = problem.num_objectives();
        if m != cfg.num_objectives() {
            return Err(Error::Dimension { expected: cfg.num_objectives(), got: m });
        }
        let mask = cfg.initial_mask()?;
        let relevant = cfg.relevant_set();
        let record = RunRecord {
            format: RUN_RECORD_FORMAT.into(),
            mode: cfg.mode,
            variant: match cfg.mode {
                Mode::Detection => cfg.detection.as_ref().map(|d| d.variant_name().into()),
                _ => None,
            },
            seed: cfg.seed,
            m,
            relevant: relevant.indices().iter().map(|i| i + 1).collect(),
            initial_active: mask.one_based(),
            interactions: Vec::new(),
            segments: Vec::new(),
            final_solution: None,
            evaluations: EvalCounter::new(m),
            charges: ChargeBreakdown::default(),
            post_first_interaction: None,
            reporting_evaluations: 0,
        };
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            problem,
            relevant,
            pop: Population { individuals: Vec::new(), generation: 0 },
            mask,
            counter: EvalCounter::new(m),
            archive: Vec::new(),
            criterion: SecondaryCriterion::CrowdingDistance,
            previous_best: None,
            best_so_far: None,
            counter_at_first: None,
            stage: Stage::NotStarted,
            record,
            cfg,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.cfg
    }

    pub fn status(&self) -> Status {
        match &self.stage {
            Stage::NotStarted => Status::NotStarted,
            Stage::Awaiting { interaction, .. } => Status::AwaitingRanking { interaction: *interaction },
            Stage::Finished => Status::Finished,
        }
    }

    pub fn mask(&self) -> &ActiveMask {
        &self.mask
    }

    pub fn population(&self) -> &Population {
        &self.pop
    }

    pub fn counter(&self) -> &EvalCounter {
        &self.counter
    }

    /// The record so far; complete once the run is finished.
    pub fn record(&self) -> &RunRecord {
        &self.record
    }

    pub fn into_record(self) -> RunRecord {
        self.record
    }

    /// Full objective vectors awaiting a ranking, if any.
    pub fn pending(&self) -> Option<Vec<ObjectiveVector>> {
        match &self.stage {
            Stage::Awaiting { shown, .. } => {
                Some(shown.iter().map(|s| s.objective_vector().expect("shown solutions are fully evaluated")).collect())
            }
            _ => None,
        }
    }

    /// Starts the run if needed and evolves up to the first interaction (or
    /// to the end in golden mode). Idempotent while awaiting a ranking.
    pub fn advance(&mut self) -> Result<Status> {
        if !matches!(self.stage, Stage::NotStarted) {
            return Ok(self.status());
        }
        let m = self.problem.num_objectives();
        let encoding = self.problem.encoding();
        self.pop = Population::random(&encoding, m, self.cfg.nsga2.population_size, &mut self.rng);
        let before = self.counter.total();
        {
            let mut ctx = EvalContext::new(&self.problem, &self.relevant, &mut self.counter);
            for ind in self.pop.individuals.iter_mut() {
                ctx.ensure(ind, &self.mask)?;
            }
        }
        self.record.charges.initial += self.counter.total() - before;
        self.evolve_segment(self.cfg.gen_first)?;

        if self.cfg.mode == Mode::Golden {
            let uf = self.cfg.utility.clone().expect("validated");
            self.criterion = SecondaryCriterion::TrueUtility(uf);
            let rest = self.cfg.trailing_generations()?;
            self.evolve_segment(rest)?;
            self.finish()?;
        } else {
            self.prepare_interaction(1)?;
        }
        Ok(self.status())
    }

    /// Feeds the decision maker's ranks for the pending candidates and
    /// evolves until the next interaction or the end of the run.
    pub fn submit_ranking(&mut self, ranks: &[u32]) -> Result<Status> {
        let (interaction, shown) = match core::mem::replace(&mut self.stage, Stage::NotStarted) {
            Stage::Awaiting { interaction, shown } => (interaction, shown),
            other => {
                self.stage = other;
                return Err(Error::State("no ranking is pending".into()));
            }
        };
        if ranks.len() != shown.len() || ranks.contains(&0) {
            let len = shown.len();
            self.stage = Stage::Awaiting { interaction, shown };
            return Err(Error::Ranking(alloc::format!("expected {len} positive ranks, got {ranks:?}")));
        }
        self.process_ranking(interaction, shown, ranks)?;
        Ok(self.status())
    }

    fn process_ranking(&mut self, interaction: usize, shown: Vec<Individual>, ranks: &[u32]) -> Result<()> {
        let vectors = shown.iter().map(Individual::objective_vector).collect::<Result<Vec<_>>>()?;
        if let Some(uf) = &self.cfg.utility {
            for v in &vectors {
                let u = uf.utility(v)?;
                self.best_so_far = Some(self.best_so_far.map_or(u, |b| b.min(u)));
            }
        }
        let top = (0..ranks.len()).min_by_key(|&i| (ranks[i], i)).expect("non-empty");
        self.previous_best = Some(shown[top].clone());
        self.archive.push(RankedBatch::new(vectors.clone(), ranks.to_vec())?);
        if interaction == 1 {
            self.counter_at_first = Some(self.counter.clone());
        }

        let active_before = self.mask.one_based();
        let mut p_values = None;
        let mut contributions = None;
        if self.cfg.mode == Mode::Detection {
            let det_cfg = self.cfg.detection.clone().expect("validated");
            let seed = match det_cfg.method {
                Method::Rfe => self.rng.next_u64(),
                Method::Univariate => 0,
            };
            let detection = detect(&self.archive, &det_cfg, seed)?;
            detection.mask.check_floor()?;
            self.mask = detection.mask;
            p_values = detection.p_values;
            contributions = detection.contributions;
            let before = self.counter.total();
            let mut ctx = EvalContext::new(&self.problem, &self.relevant, &mut self.counter);
            for ind in self.pop.individuals.iter_mut() {
                ctx.ensure(ind, &self.mask)?;
            }
            self.record.charges.reevaluation += self.counter.total() - before;
        }

        let model = fit_utility(&self.archive, &self.mask, &self.cfg.learning)?;
        let (model_constant, pair_error) = (model.is_constant(), model.training_pair_error());
        self.criterion = learned_criterion(model);

        self.record.interactions.push(InteractionRecord {
            index: interaction,
            shown: vectors.into_iter().map(ObjectiveVector::into_inner).collect(),
            ranks: ranks.to_vec(),
            active_before,
            active_after: self.mask.one_based(),
            p_values,
            contributions,
            best_so_far_utility: self.best_so_far,
            model_constant,
            training_pair_error: pair_error,
            evaluations_total: self.counter.total(),
        });

        if interaction < self.cfg.interactions {
            self.evolve_segment(self.cfg.gen_between)?;
            self.prepare_interaction(interaction + 1)
        } else {
            let rest = self.cfg.trailing_generations()?;
            self.evolve_segment(rest)?;
            self.finish()
        }
    }

    fn evolve_segment(&mut self, generations: usize) -> Result<()> {
        let before = self.counter.total();
        let pop = core::mem::replace(&mut self.pop, Population { individuals: Vec::new(), generation: 0 });
        let mut ctx = EvalContext::new(&self.problem, &self.relevant, &mut self.counter);
        self.pop = self.cfg.nsga2.evolve(pop, &mut ctx, &self.mask, generations, &self.criterion, &mut self.rng)?;
        let charged = self.counter.total() - before;
        self.record.charges.generations += charged;
        self.record.segments.push(SegmentRecord { generations, active: self.mask.one_based(), evaluations: charged });
        Ok(())
    }

    fn prepare_interaction(&mut self, interaction: usize) -> Result<()> {
        let ranking = Ranking::compute(&self.pop.individuals, &self.mask, &self.criterion)?;
        let previous = if self.cfg.elitist_examples { self.previous_best.as_ref() } else { None };
        let picks = select_examples(&self.pop.individuals, &ranking, self.cfg.examples_per_interaction, previous);
        let all = ActiveMask::all(self.problem.num_objectives());
        let before = self.counter.total();
        let mut shown = Vec::with_capacity(picks.len());
        let mut ctx = EvalContext::new(&self.problem, &self.relevant, &mut self.counter);
        for pick in picks {
            match pick {
                ExampleSource::Population(i) => {
                    // evaluated in place so the population keeps the values
                    ctx.ensure(&mut self.pop.individuals[i], &all)?;
                    shown.push(self.pop.individuals[i].clone());
                }
                ExampleSource::PreviousBest => {
                    let mut best = self.previous_best.clone().expect("selected only when present");
                    ctx.ensure(&mut best, &all)?;
                    shown.push(best);
                }
            }
        }
        self.record.charges.interactions += self.counter.total() - before;
        self.stage = Stage::Awaiting { interaction, shown };
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        let ranking = Ranking::compute(&self.pop.individuals, &self.mask, &self.criterion)?;
        let best_index = ranking.order()[0];
        let mut best = self.pop.individuals[best_index].clone();
        for i in 0..best.num_objectives() {
            if !best.is_evaluated(i) {
                let v = self.problem.evaluate(&best.x, i)?;
                best.set_objective(i, v);
                self.record.reporting_evaluations += 1;
            }
        }
        let objectives = best.objective_vector()?;
        let true_utility = match &self.cfg.utility {
            Some(uf) => Some(uf.utility(&objectives)?),
            None => None,
        };
        self.record.final_solution =
            Some(FinalSolution { decision: best.x, objectives: objectives.into_inner(), true_utility });
        self.record.evaluations = self.counter.clone();
        if let Some(first) = &self.counter_at_first {
            self.record.post_first_interaction = Some(EvalSplit {
                total: self.counter.total() - first.total(),
                relevant: self.counter.relevant_total - first.relevant_total,
                irrelevant: self.counter.irrelevant_total - first.irrelevant_total,
            });
        }
        self.stage = Stage::Finished;
        Ok(())
    }
}

/// A constant model carries no preference information; crowding distance
/// keeps selection pressure defined in that case.
fn learned_criterion(model: UtilityModel) -> SecondaryCriterion {
    if model.is_constant() {
        SecondaryCriterion::CrowdingDistance
    } else {
        SecondaryCriterion::LearnedUtility(model)
    }
}

/// Runs `cfg` to completion with the machine decision maker.
pub fn run(cfg: RunConfig) -> Result<RunRecord> {
    let problem = {
        cfg.validate()?;
        cfg.problem.instantiate()?
    };
    run_with_problem(cfg, problem)
}

/// [`run`] on an explicit problem instance.
pub fn run_with_problem<P: Problem>(cfg: RunConfig, problem: P) -> Result<RunRecord> {
    let uf = match (cfg.mode, &cfg.utility) {
        (_, Some(uf)) => Some(uf.clone()),
        (Mode::Golden, None) => None,
        (_, None) => return Err(Error::Config("the machine decision maker needs a utility".into())),
    };
    let mut run = Run::with_problem(cfg, problem)?;
    let mut status = run.advance()?;
    while let Status::AwaitingRanking { .. } = status {
        let shown = run.pending().expect("awaiting");
        let ranks = mdm_rank(&shown, uf.as_ref().expect("checked above"))?;
        status = run.submit_ranking(&ranks)?;
    }
    Ok(run.into_record())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::Policy;
    use crate::mdm::UtilityKind;
    use crate::problems::DtlzVariant;
    use alloc::vec;

    fn small(mode: Mode) -> RunConfig {
        let uf = UtilityFunction::quadratic(UtilityKind::Uf1, RelevantSet::new(vec![0, 3]).unwrap()).unwrap();
        let mut cfg = RunConfig::new(ProblemSpec::Dtlz { variant: DtlzVariant::Dtlz2, m: 4, n: None }, Some(uf), mode);
        cfg.nsga2.population_size = 20;
        cfg.nsga2.offspring_per_generation = 20;
        cfg.total_generations = 30;
        cfg.gen_first = 10;
        cfg.gen_between = 5;
        cfg.interactions = 3;
        cfg
    }

    #[test]
    fn schedule_arithmetic() {
        let mut cfg = small(Mode::OnlyLearning);
        cfg.total_generations = 500;
        cfg.gen_first = 200;
        cfg.interactions = 1;
        assert_eq!(cfg.trailing_generations().unwrap(), 300);
        cfg.interactions = 12;
        cfg.gen_between = 30;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn default_initial_masks() {
        assert_eq!(small(Mode::Golden).initial_mask().unwrap().one_based(), vec![1, 4]);
        assert_eq!(small(Mode::OnlyLearning).initial_mask().unwrap().one_based(), vec![2, 4]);
        let mut cfg = small(Mode::Detection);
        cfg.detection = Some(DetectionConfig::new(Method::Univariate, Policy::Threshold(0.1)).unwrap());
        assert_eq!(cfg.initial_mask().unwrap().count_active(), 4);
        cfg.detection = Some(DetectionConfig::new(Method::Univariate, Policy::FixedK(2)).unwrap());
        assert_eq!(cfg.initial_mask().unwrap().one_based(), vec![2, 4]);
    }

    #[test]
    fn golden_has_no_interactions() {
        let rec = run(small(Mode::Golden)).unwrap();
        assert!(rec.interactions.is_empty());
        assert!(rec.final_solution.unwrap().true_utility.is_some());
        assert_eq!(rec.charges.interactions, 0);
        assert_eq!(rec.post_first_interaction, None);
    }

    #[test]
    fn only_learning_keeps_mask() {
        let rec = run(small(Mode::OnlyLearning)).unwrap();
        assert_eq!(rec.interactions.len(), 3);
        assert!(rec.interactions.iter().all(|i| i.active_after == vec![2, 4]));
        assert_eq!(rec.charges.total(), rec.evaluations.total());
    }

    #[test]
    fn submit_validates_ranks() {
        let mut cfg = small(Mode::Detection);
        cfg.detection = Some(DetectionConfig::new(Method::Univariate, Policy::FixedK(2)).unwrap());
        let mut r = Run::new(cfg).unwrap();
        assert!(r.submit_ranking(&[1, 2, 3, 4, 5]).is_err());
        assert_eq!(r.advance().unwrap(), Status::AwaitingRanking { interaction: 1 });
        let frozen = r.counter().clone();
        assert!(matches!(r.submit_ranking(&[1, 2, 3, 4]), Err(Error::Ranking(_))));
        assert!(matches!(r.submit_ranking(&[0, 2, 3, 4, 5]), Err(Error::Ranking(_))));
        assert_eq!(r.advance().unwrap(), Status::AwaitingRanking { interaction: 1 });
        assert_eq!(r.counter(), &frozen);
        assert_eq!(r.submit_ranking(&[1, 2, 2, 4, 5]).unwrap(), Status::AwaitingRanking { interaction: 2 });
        assert_eq!(r.record().interactions[0].ranks, vec![1, 2, 2, 4, 5]);
    }

    #[test]
    fn machine_dm_needs_utility() {
        let mut cfg = small(Mode::OnlyLearning);
        cfg.utility = None;
        assert!(run(cfg).is_err());
    }
}

use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sort::{crowding_distance, nondominated_fronts};
use super::variation::{variation, VariationConfig};
use crate::error::{Error, Result};
use crate::learning::UtilityModel;
use crate::mdm::UtilityFunction;
use crate::problems::{Encoding, Problem};
use crate::types::{ActiveMask, Decision, EvalCounter, Individual, RelevantSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub individuals: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    /// Uniform random individuals, none of them evaluated yet.
    pub fn random<R: Rng + ?Sized>(encoding: &Encoding, m: usize, size: usize, rng: &mut R) -> Self {
        let individuals = (0..size)
            .map(|_| {
                let x = match *encoding {
                    Encoding::Real { n, lower, upper } => {
                        Decision::Real((0..n).map(|_| rng.random_range(lower..=upper)).collect())
                    }
                    Encoding::Binary { n } => Decision::Binary((0..n).map(|_| rng.random::<bool>()).collect()),
                };
                Individual::new(x, m)
            })
            .collect();
        Self { individuals, generation: 0 }
    }

    pub fn len(&self) -> usize {
        self.individuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.individuals.is_empty()
    }
}

/// How members of the same non-domination front are ordered.
#[derive(Debug, Clone, PartialEq)]
pub enum SecondaryCriterion {
    /// Larger crowding distance is better.
    CrowdingDistance,
    /// Lower learned score is better. The model's mask snapshot must match.
    LearnedUtility(UtilityModel),
    /// Lower true utility is better.
    TrueUtility(UtilityFunction),
}

impl SecondaryCriterion {
    /// Objectives that must be computed beyond the active ones.
    fn extra_required(&self) -> &[usize] {
        match self {
            SecondaryCriterion::TrueUtility(uf) => uf.relevant().indices(),
            _ => &[],
        }
    }
}

/// Problem access plus the evaluation accounting of one run.
pub struct EvalContext<'a, P: ?Sized> {
    pub problem: &'a P,
    pub relevant: &'a RelevantSet,
    pub counter: &'a mut EvalCounter,
}

impl<'a, P: Problem + ?Sized> EvalContext<'a, P> {
    pub fn new(problem: &'a P, relevant: &'a RelevantSet, counter: &'a mut EvalCounter) -> Self {
        Self { problem, relevant, counter }
    }

    /// Computes every objective of `mask` that `ind` lacks, charging each one.
    /// Returns the number of evaluations performed.
    pub fn ensure(&mut self, ind: &mut Individual, mask: &ActiveMask) -> Result<u64> {
        self.ensure_indices(ind, mask.indices())
    }

    pub fn ensure_indices(&mut self, ind: &mut Individual, indices: impl IntoIterator<Item = usize>) -> Result<u64> {
        let mut charged = 0;
        for i in indices {
            if !ind.is_evaluated(i) {
                let v = self.problem.evaluate(&ind.x, i)?;
                ind.set_objective(i, v);
                self.counter.count(i, self.relevant)?;
                charged += 1;
            }
        }
        Ok(charged)
    }
}

/// Front index and within-front key (lower is better) of every individual.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub front: Vec<usize>,
    pub key: Vec<f64>,
}

impl Ranking {
    /// Total order used for survival and for picking "best" solutions:
    /// front, then key, then position.
    pub fn compare(&self, a: usize, b: usize) -> Ordering {
        self.front[a].cmp(&self.front[b]).then(self.key[a].total_cmp(&self.key[b])).then(a.cmp(&b))
    }

    /// Indices sorted best first.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.front.len()).collect();
        idx.sort_by(|&a, &b| self.compare(a, b));
        idx
    }

    /// Ranks a set of individuals. Active objectives, and anything the
    /// criterion needs, must already be evaluated.
    pub fn compute(inds: &[Individual], mask: &ActiveMask, criterion: &SecondaryCriterion) -> Result<Self> {
        for ind in inds {
            if !ind.is_evaluated_on(mask) {
                return Err(Error::State("population has unevaluated active objectives".into()));
            }
        }
        let values: Vec<&[f64]> = inds.iter().map(|i| i.raw_values()).collect();
        let fronts = nondominated_fronts(&values, mask);
        let mut front = alloc::vec![0; inds.len()];
        let mut key = alloc::vec![0.0; inds.len()];
        for (f, members) in fronts.iter().enumerate() {
            for &i in members {
                front[i] = f;
            }
            match criterion {
                SecondaryCriterion::CrowdingDistance => {
                    let pts: Vec<&[f64]> = members.iter().map(|&i| values[i]).collect();
                    for (&i, d) in members.iter().zip(crowding_distance(&pts, mask)) {
                        key[i] = -d;
                    }
                }
                SecondaryCriterion::LearnedUtility(model) => {
                    for &i in members {
                        key[i] = model.score_individual(&inds[i], mask)?;
                    }
                }
                SecondaryCriterion::TrueUtility(uf) => {
                    for &i in members {
                        key[i] = uf.utility_of(&inds[i])?;
                    }
                }
            }
        }
        Ok(Self { front, key })
    }
}

/// NSGA-II parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Nsga2 {
    pub population_size: usize,
    pub offspring_per_generation: usize,
    pub variation: VariationConfig,
}

impl Default for Nsga2 {
    fn default() -> Self {
        Self { population_size: 100, offspring_per_generation: 100, variation: VariationConfig::default() }
    }
}

impl Nsga2 {
    /// Runs `generations` generational steps. Offspring are evaluated on the
    /// active objectives (plus those the criterion reads) and charged to the
    /// context. The returned population is ordered best first.
    pub fn evolve<P: Problem + ?Sized, R: Rng + ?Sized>(
        &self,
        mut pop: Population,
        ctx: &mut EvalContext<'_, P>,
        mask: &ActiveMask,
        generations: usize,
        criterion: &SecondaryCriterion,
        rng: &mut R,
    ) -> Result<Population> {
        if generations == 0 {
            return Ok(pop);
        }
        if pop.is_empty() {
            return Err(Error::State("cannot evolve an empty population".into()));
        }
        let encoding = ctx.problem.encoding();
        let extra = criterion.extra_required();
        for ind in pop.individuals.iter_mut() {
            ctx.ensure(ind, mask)?;
            ctx.ensure_indices(ind, extra.iter().copied())?;
        }
        for _ in 0..generations {
            let ranking = Ranking::compute(&pop.individuals, mask, criterion)?;
            let mut offspring = Vec::with_capacity(self.offspring_per_generation + 1);
            while offspring.len() < self.offspring_per_generation {
                let a = tournament(&ranking, rng);
                let b = tournament(&ranking, rng);
                let (c1, c2) =
                    variation(&pop.individuals[a].x, &pop.individuals[b].x, &encoding, &self.variation, rng)?;
                offspring.push(c1);
                offspring.push(c2);
            }
            offspring.truncate(self.offspring_per_generation);
            let m = ctx.problem.num_objectives();
            let mut merged = pop.individuals;
            for x in offspring {
                let mut child = Individual::new(x, m);
                ctx.ensure(&mut child, mask)?;
                ctx.ensure_indices(&mut child, extra.iter().copied())?;
                merged.push(child);
            }
            let ranking = Ranking::compute(&merged, mask, criterion)?;
            let keep = self.population_size.min(merged.len());
            let order = ranking.order();
            let mut slots: Vec<Option<Individual>> = merged.into_iter().map(Some).collect();
            pop.individuals = order[..keep].iter().map(|&i| slots[i].take().expect("index used once")).collect();
            pop.generation += 1;
        }
        Ok(pop)
    }
}

/// Binary tournament on (front, key).
fn tournament<R: Rng + ?Sized>(ranking: &Ranking, rng: &mut R) -> usize {
    let n = ranking.front.len();
    let a = rng.random_range(0..n);
    let b = rng.random_range(0..n);
    if ranking.compare(b, a) == Ordering::Less {
        b
    } else {
        a
    }
}

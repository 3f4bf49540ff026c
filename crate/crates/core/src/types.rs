//! Shared data model: objective vectors, activity masks, individuals with lazily
//! computed objectives, and objective-evaluation accounting.
//!
//! Indices are 0-based everywhere in this crate. Reports render them 1-based.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The full `m`-dimensional objective values of a solution (minimization).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    /// Builds a vector, rejecting non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(alloc::format!("objective {bad} is not finite")));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Drops inactive coordinates, keeping the active ones in index order.
    pub fn project(&self, mask: &ActiveMask) -> Result<Vec<f64>> {
        check_len(mask.len(), self.len())?;
        Ok(mask.indices().map(|i| self.0[i]).collect())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Index<usize> for ObjectiveVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl From<ObjectiveVector> for Vec<f64> {
    fn from(v: ObjectiveVector) -> Self {
        v.0
    }
}

/// Binary vector `d` selecting the objectives the optimizer currently uses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActiveMask(Vec<bool>);

impl ActiveMask {
    pub fn all(m: usize) -> Self {
        Self(vec![true; m])
    }

    pub fn none(m: usize) -> Self {
        Self(vec![false; m])
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// Mask of length `m` with the given 0-based indices active.
    pub fn from_indices(m: usize, active: &[usize]) -> Result<Self> {
        let mut bits = vec![false; m];
        for &i in active {
            if i >= m {
                return Err(Error::ObjectiveIndex { index: i, m });
            }
            bits[i] = true;
        }
        Ok(Self(bits))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_active(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn count_active(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    /// Active indices in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    /// Active indices rendered 1-based, as used in logs and files.
    pub fn one_based(&self) -> Vec<usize> {
        self.indices().map(|i| i + 1).collect()
    }

    pub fn as_bools(&self) -> &[bool] {
        &self.0
    }

    /// Mask with `self ∪ other`.
    pub fn union(&self, other: &ActiveMask) -> Result<ActiveMask> {
        check_len(self.len(), other.len())?;
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| *a || *b).collect()))
    }

    /// Optimizer-facing validity: at least two objectives are active.
    pub fn check_floor(&self) -> Result<()> {
        if self.count_active() < 2 {
            return Err(Error::State(alloc::format!(
                "active mask has {} objectives, the optimizer needs at least 2",
                self.count_active()
            )));
        }
        Ok(())
    }
}

/// Ordered set `c` of objectives the decision maker cares about (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct RelevantSet(Vec<usize>);

impl RelevantSet {
    /// Indices must be strictly increasing.
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("relevant objective indices must be strictly increasing".into()));
        }
        Ok(Self(indices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Checks all indices against the number of objectives.
    pub fn validate(&self, m: usize) -> Result<()> {
        match self.0.iter().find(|&&i| i >= m) {
            Some(&index) => Err(Error::ObjectiveIndex { index, m }),
            None => Ok(()),
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_mask(&self, m: usize) -> Result<ActiveMask> {
        ActiveMask::from_indices(m, &self.0)
    }
}

impl TryFrom<Vec<usize>> for RelevantSet {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<RelevantSet> for Vec<usize> {
    fn from(c: RelevantSet) -> Self {
        c.0
    }
}

/// Decision vector: box-bounded reals or a bit-string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Real(Vec<f64>),
    Binary(Vec<bool>),
}

impl Decision {
    pub fn len(&self) -> usize {
        match self {
            Decision::Real(x) => x.len(),
            Decision::Binary(b) => b.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A solution together with whichever objective values have been computed so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub x: Decision,
    values: Vec<f64>,
    evaluated: Vec<bool>,
}

impl Individual {
    pub fn new(x: Decision, m: usize) -> Self {
        Self { x, values: vec![0.0; m], evaluated: vec![false; m] }
    }

    pub fn num_objectives(&self) -> usize {
        self.values.len()
    }

    pub fn is_evaluated(&self, i: usize) -> bool {
        self.evaluated[i]
    }

    pub fn evaluated_flags(&self) -> &[bool] {
        &self.evaluated
    }

    /// Value of objective `i`, if it has been computed.
    pub fn objective(&self, i: usize) -> Option<f64> {
        self.evaluated[i].then(|| self.values[i])
    }

    /// Raw value storage; entries whose flag is unset are meaningless.
    pub fn raw_values(&self) -> &[f64] {
        &self.values
    }

    pub fn set_objective(&mut self, i: usize, value: f64) {
        self.values[i] = value;
        self.evaluated[i] = true;
    }

    /// Whether every objective selected by `mask` has been computed.
    pub fn is_evaluated_on(&self, mask: &ActiveMask) -> bool {
        mask.indices().all(|i| self.evaluated[i])
    }

    /// The full objective vector; fails unless every objective is computed.
    pub fn objective_vector(&self) -> Result<ObjectiveVector> {
        if let Some(i) = self.evaluated.iter().position(|e| !e) {
            return Err(Error::State(alloc::format!("objective {i} has not been evaluated")));
        }
        ObjectiveVector::new(self.values.clone())
    }

    /// Active coordinates only; fails if any of them is unevaluated.
    pub fn projected(&self, mask: &ActiveMask) -> Result<Vec<f64>> {
        check_len(mask.len(), self.values.len())?;
        mask.indices()
            .map(|i| {
                if self.evaluated[i] {
                    Ok(self.values[i])
                } else {
                    Err(Error::State(alloc::format!("active objective {i} has not been evaluated")))
                }
            })
            .collect()
    }
}

/// Counts single-objective evaluations, split by relevance to the decision maker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounter {
    pub per_objective: Vec<u64>,
    pub relevant_total: u64,
    pub irrelevant_total: u64,
}

impl EvalCounter {
    pub fn new(m: usize) -> Self {
        Self { per_objective: vec![0; m], relevant_total: 0, irrelevant_total: 0 }
    }

    /// Records one evaluation of objective `i`.
    pub fn count(&mut self, i: usize, relevant: &RelevantSet) -> Result<()> {
        let m = self.per_objective.len();
        let slot = self.per_objective.get_mut(i).ok_or(Error::ObjectiveIndex { index: i, m })?;
        *slot += 1;
        if relevant.contains(i) {
            self.relevant_total += 1;
        } else {
            self.irrelevant_total += 1;
        }
        Ok(())
    }

    pub fn total(&self) -> u64 {
        self.relevant_total + self.irrelevant_total
    }
}

/// `f ⊙ d`: inactive entries become exactly zero.
pub fn apply_mask(f: &ObjectiveVector, d: &ActiveMask) -> Result<ObjectiveVector> {
    check_len(f.len(), d.len())?;
    Ok(ObjectiveVector(f.0.iter().zip(&d.0).map(|(v, &a)| if a { *v } else { 0.0 }).collect()))
}

/// Pareto dominance (minimization) restricted to the active objectives.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector, d: &ActiveMask) -> Result<bool> {
    check_len(a.len(), b.len())?;
    check_len(a.len(), d.len())?;
    Ok(dominates_slices(&a.0, &b.0, d))
}

/// Unchecked variant used in hot loops; lengths must agree.
pub(crate) fn dominates_slices(a: &[f64], b: &[f64], d: &ActiveMask) -> bool {
    let mut strictly = false;
    for i in d.indices() {
        if a[i] > b[i] {
            return false;
        }
        if a[i] < b[i] {
            strictly = true;
        }
    }
    strictly
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension { expected, got });
    }
    Ok(())
}

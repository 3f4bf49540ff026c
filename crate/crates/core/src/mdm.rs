//! Machine decision maker: a hidden utility function over the relevant
//! objectives, and the ranking it returns at interactions.
//!
//! Utilities are minimized: lower means more preferred.

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Individual, ObjectiveVector, RelevantSet};

/// Utilities closer than this are treated as ties when ranking.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Default Tchebychef weights on `(c1, c2)`. Chosen, not taken from published
/// experiments, so that the preferred point sits away from the corners.
pub const DEFAULT_TCHEBYCHEF_WEIGHTS: [f64; 2] = [0.4, 0.6];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtilityKind {
    Uf1,
    Uf2,
    Uf3,
    Tchebychef,
}

/// The decision maker's true utility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UtilitySpec", into = "UtilitySpec")]
pub struct UtilityFunction {
    kind: UtilityKind,
    relevant: RelevantSet,
    /// One weight per relevant objective (Tchebychef only).
    weights: Vec<f64>,
    /// Ideal point on the relevant objectives (Tchebychef only).
    ideal: Vec<f64>,
}

impl UtilityFunction {
    /// One of the quadratic utilities; `relevant` must hold exactly two indices.
    pub fn quadratic(kind: UtilityKind, relevant: RelevantSet) -> Result<Self> {
        if kind == UtilityKind::Tchebychef {
            return Err(Error::Config("use UtilityFunction::tchebychef".into()));
        }
        if relevant.len() != 2 {
            return Err(Error::Config(format!(
                "quadratic utilities take exactly 2 relevant objectives, got {}",
                relevant.len()
            )));
        }
        Ok(Self { kind, relevant, weights: Vec::new(), ideal: Vec::new() })
    }

    /// `max_{i in c} w_i |f_i - f*_i|`; `ideal` defaults to the origin.
    pub fn tchebychef(relevant: RelevantSet, weights: Vec<f64>, ideal: Option<Vec<f64>>) -> Result<Self> {
        if relevant.is_empty() {
            return Err(Error::Config("Tchebychef utility needs relevant objectives".into()));
        }
        if weights.len() != relevant.len() {
            return Err(Error::Dimension { expected: relevant.len(), got: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("Tchebychef weights must be finite and non-negative".into()));
        }
        let ideal = ideal.unwrap_or_else(|| alloc::vec![0.0; relevant.len()]);
        if ideal.len() != relevant.len() {
            return Err(Error::Dimension { expected: relevant.len(), got: ideal.len() });
        }
        Ok(Self { kind: UtilityKind::Tchebychef, relevant, weights, ideal })
    }

    pub fn kind(&self) -> UtilityKind {
        self.kind
    }

    pub fn relevant(&self) -> &RelevantSet {
        &self.relevant
    }

    /// Weights expanded to all `m` objectives; zero outside the relevant set.
    pub fn full_weights(&self, m: usize) -> Vec<f64> {
        let mut w = alloc::vec![0.0; m];
        if self.kind == UtilityKind::Tchebychef {
            for (&i, &wi) in self.relevant.indices().iter().zip(&self.weights) {
                w[i] = wi;
            }
        }
        w
    }

    pub fn utility(&self, f: &ObjectiveVector) -> Result<f64> {
        self.relevant.validate(f.len())?;
        Ok(self.eval(|i| f[i]))
    }

    /// Utility of an individual whose relevant objectives are evaluated.
    pub fn utility_of(&self, ind: &Individual) -> Result<f64> {
        self.relevant.validate(ind.num_objectives())?;
        for &i in self.relevant.indices() {
            if !ind.is_evaluated(i) {
                return Err(Error::State(format!("relevant objective {i} not evaluated")));
            }
        }
        Ok(self.eval(|i| ind.raw_values()[i]))
    }

    fn eval(&self, f: impl Fn(usize) -> f64) -> f64 {
        let c = self.relevant.indices();
        match self.kind {
            UtilityKind::Uf1 => {
                let (a, b) = (f(c[0]), f(c[1]));
                0.28 * a * a + 0.38 * b * b + 0.29 * a * b + 0.05 * a
            }
            UtilityKind::Uf2 => {
                let (a, b) = (f(c[0]), f(c[1]));
                0.6 * a * a + 0.05 * a * b + 0.23 * a + 0.38 * b
            }
            UtilityKind::Uf3 => {
                let (a, b) = (f(c[0]), f(c[1]));
                0.44 * a * a + 0.14 * b * b + 0.09 * a * b + 0.33 * a
            }
            UtilityKind::Tchebychef => c
                .iter()
                .zip(&self.weights)
                .zip(&self.ideal)
                .map(|((&i, w), z)| w * libm::fabs(f(i) - z))
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Competition ranks (1 = best, ties share the lower rank: 1, 2, 2, 4) of
/// utility values. Values within [`TIE_TOLERANCE`] of each other tie.
pub fn competition_ranks(utilities: &[f64]) -> Vec<u32> {
    utilities.iter().map(|&u| 1 + utilities.iter().filter(|&&v| v < u - TIE_TOLERANCE).count() as u32).collect()
}

/// Ranks the shown objective vectors by true utility.
pub fn mdm_rank(shown: &[ObjectiveVector], uf: &UtilityFunction) -> Result<Vec<u32>> {
    if shown.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: shown.len() });
    }
    let utilities = shown.iter().map(|f| uf.utility(f)).collect::<Result<Vec<_>>>()?;
    Ok(competition_ranks(&utilities))
}

/// Serialized form; relevant indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilitySpec {
    pub kind: UtilityKind,
    pub relevant: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<Vec<f64>>,
}

impl TryFrom<UtilitySpec> for UtilityFunction {
    type Error = Error;

    fn try_from(spec: UtilitySpec) -> Result<Self> {
        let zero_based = spec
            .relevant
            .iter()
            .map(|&i| i.checked_sub(1).ok_or_else(|| Error::Config("relevant objectives are numbered from 1".into())))
            .collect::<Result<Vec<_>>>()?;
        let relevant = RelevantSet::new(zero_based)?;
        match spec.kind {
            UtilityKind::Tchebychef => {
                let weights = match spec.weights {
                    Some(w) => w,
                    None if relevant.len() == 2 => DEFAULT_TCHEBYCHEF_WEIGHTS.to_vec(),
                    None => alloc::vec![1.0 / relevant.len() as f64; relevant.len()],
                };
                Self::tchebychef(relevant, weights, spec.ideal)
            }
            kind => Self::quadratic(kind, relevant),
        }
    }
}

impl From<UtilityFunction> for UtilitySpec {
    fn from(uf: UtilityFunction) -> Self {
        let tch = uf.kind == UtilityKind::Tchebychef;
        UtilitySpec {
            kind: uf.kind,
            relevant: uf.relevant.indices().iter().map(|i| i + 1).collect(),
            weights: tch.then_some(uf.weights),
            ideal: tch.then_some(uf.ideal),
        }
    }
}

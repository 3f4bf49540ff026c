//! Surrogate utility learned from the decision maker's rankings.
//!
//! Every pair `(better, worse)` with distinct ranks inside one interaction
//! yields a large-margin constraint `score(worse) - score(better) >= 1`. The
//! resulting pairwise SVM (hinge loss, no bias) is solved in the dual by cyclic
//! coordinate descent, either with a linear kernel (default) or an RBF kernel.
//! Features are the active objectives, standardized on the training vectors.
//!
//! Lower scores are better, matching the minimization convention of the
//! true utilities.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{column_moments, dot};
use crate::types::{ActiveMask, Individual, ObjectiveVector};

/// Objective vectors shown at one interaction and the ranks they received.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedBatch {
    pub vectors: Vec<ObjectiveVector>,
    pub ranks: Vec<u32>,
}

impl RankedBatch {
    pub fn new(vectors: Vec<ObjectiveVector>, ranks: Vec<u32>) -> Result<Self> {
        if vectors.len() != ranks.len() {
            return Err(Error::Dimension { expected: vectors.len(), got: ranks.len() });
        }
        if ranks.contains(&0) {
            return Err(Error::Ranking("ranks start at 1".into()));
        }
        if let Some(first) = vectors.first() {
            if let Some(v) = vectors.iter().find(|v| v.len() != first.len()) {
                return Err(Error::Dimension { expected: first.len(), got: v.len() });
            }
        }
        Ok(Self { vectors, ranks })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// `(better, worse)` index pairs with strictly different ranks.
    pub fn preference_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.ranks.len();
        (0..n).flat_map(move |i| (0..n).filter_map(move |j| (self.ranks[i] < self.ranks[j]).then_some((i, j))))
    }
}

/// Flattens batches into the pooled sample `(T, r)`.
pub fn pool(batches: &[RankedBatch]) -> (Vec<ObjectiveVector>, Vec<u32>) {
    let vectors = batches.iter().flat_map(|b| b.vectors.iter().cloned()).collect();
    let ranks = batches.iter().flat_map(|b| b.ranks.iter().copied()).collect();
    (vectors, ranks)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    Linear,
    /// `exp(-gamma |u - v|^2)`; `gamma` defaults to `1 / features`.
    Rbf {
        #[serde(default)]
        gamma: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearningConfig {
    /// Box constraint on the dual variables.
    pub c: f64,
    pub tolerance: f64,
    /// Maximum number of full passes over the pairs.
    pub max_iterations: usize,
    pub kernel: Kernel,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self { c: 1.0, tolerance: 1e-6, max_iterations: 10_000, kernel: Kernel::Linear }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
enum Form {
    Constant,
    Linear { weights: Vec<f64> },
    Rbf { gamma: f64, expansion: Vec<(f64, Vec<f64>, Vec<f64>)> },
}

/// A fitted ranking model over the objectives active when it was trained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtilityModel {
    snapshot: ActiveMask,
    mean: Vec<f64>,
    /// Standard deviation per active feature; zero marks a dropped feature.
    scale: Vec<f64>,
    form: Form,
    training_set_size: usize,
    training_pairs: usize,
    training_pair_error: f64,
}

impl UtilityModel {
    pub fn snapshot(&self) -> &ActiveMask {
        &self.snapshot
    }

    /// True when every input gets the same score.
    pub fn is_constant(&self) -> bool {
        matches!(self.form, Form::Constant)
    }

    pub fn training_set_size(&self) -> usize {
        self.training_set_size
    }

    pub fn training_pairs(&self) -> usize {
        self.training_pairs
    }

    /// Fraction of training pairs the model orders wrongly (ties count as wrong).
    pub fn training_pair_error(&self) -> f64 {
        self.training_pair_error
    }

    /// Linear weights on the standardized features, if the model is linear.
    pub fn linear_weights(&self) -> Option<&[f64]> {
        match &self.form {
            Form::Linear { weights } => Some(weights),
            _ => None,
        }
    }

    fn standardize(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.scale).map(|((v, m), s)| if *s > 0.0 { (v - m) / s } else { 0.0 }).collect()
    }

    fn score_standardized(&self, z: &[f64]) -> f64 {
        match &self.form {
            Form::Constant => 0.0,
            Form::Linear { weights } => dot(weights, z),
            Form::Rbf { gamma, expansion } => expansion
                .iter()
                .map(|(alpha, worse, better)| alpha * (rbf(*gamma, z, worse) - rbf(*gamma, z, better)))
                .sum(),
        }
    }

    /// Score of a vector already projected onto the snapshot's active objectives.
    pub fn predict_score(&self, projected: &[f64]) -> Result<f64> {
        let dim = self.snapshot.count_active();
        if projected.len() != dim {
            return Err(Error::Dimension { expected: dim, got: projected.len() });
        }
        Ok(self.score_standardized(&self.standardize(projected)))
    }

    /// Scores an individual under `mask`, which must equal the training mask.
    pub fn score_individual(&self, ind: &Individual, mask: &ActiveMask) -> Result<f64> {
        if mask != &self.snapshot {
            return Err(Error::State("active objectives changed since the model was fitted".into()));
        }
        self.predict_score(&ind.projected(mask)?)
    }
}

fn rbf(gamma: f64, u: &[f64], v: &[f64]) -> f64 {
    let d2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    libm::exp(-gamma * d2)
}

/// Fits the pairwise ranking model on the active projections of all batches.
/// Pairs are only formed within a batch.
pub fn fit_utility(batches: &[RankedBatch], mask: &ActiveMask, cfg: &LearningConfig) -> Result<UtilityModel> {
    let total: usize = batches.iter().map(RankedBatch::len).sum();
    if total < 2 {
        return Err(Error::InsufficientData { needed: 2, got: total });
    }
    let dim = mask.count_active();
    let projected: Vec<Vec<Vec<f64>>> = batches
        .iter()
        .map(|b| b.vectors.iter().map(|v| v.project(mask)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = projected.iter().flatten().cloned().collect();
    let (mean, sd) = column_moments(&rows, dim);
    let scale: Vec<f64> = sd.iter().map(|&s| if s > 1e-12 { s } else { 0.0 }).collect();

    let mut model = UtilityModel {
        snapshot: mask.clone(),
        mean,
        scale,
        form: Form::Constant,
        training_set_size: total,
        training_pairs: 0,
        training_pair_error: 0.0,
    };

    // (worse, better) in standardized coordinates
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    for (batch, proj) in batches.iter().zip(&projected) {
        for (better, worse) in batch.preference_pairs() {
            pairs.push((model.standardize(&proj[worse]), model.standardize(&proj[better])));
        }
    }
    model.training_pairs = pairs.len();
    if pairs.is_empty() || model.scale.iter().all(|&s| s == 0.0) {
        model.training_pair_error = if pairs.is_empty() { 0.0 } else { 1.0 };
        return Ok(model);
    }

    model.form = match cfg.kernel {
        Kernel::Linear => solve_linear(&pairs, dim, cfg),
        Kernel::Rbf { gamma } => {
            let gamma = gamma.unwrap_or(1.0 / dim as f64);
            solve_rbf(&pairs, gamma, cfg)
        }
    };
    let wrong = pairs.iter().filter(|(w, b)| model.score_standardized(w) <= model.score_standardized(b)).count();
    model.training_pair_error = wrong as f64 / pairs.len() as f64;
    Ok(model)
}

fn solve_linear(pairs: &[(Vec<f64>, Vec<f64>)], dim: usize, cfg: &LearningConfig) -> Form {
    let z: Vec<Vec<f64>> = pairs.iter().map(|(w, b)| w.iter().zip(b).map(|(x, y)| x - y).collect()).collect();
    let q_diag: Vec<f64> = z.iter().map(|zp| dot(zp, zp)).collect();
    let mut alpha = alloc::vec![0.0; z.len()];
    let mut w = alloc::vec![0.0; dim];
    for _ in 0..cfg.max_iterations {
        let mut max_violation: f64 = 0.0;
        for p in 0..z.len() {
            if q_diag[p] <= 0.0 {
                continue;
            }
            let g = dot(&w, &z[p]) - 1.0;
            let pg = projected_gradient(g, alpha[p], cfg.c);
            max_violation = max_violation.max(libm::fabs(pg));
            if pg != 0.0 {
                let old = alpha[p];
                alpha[p] = (old - g / q_diag[p]).clamp(0.0, cfg.c);
                let delta = alpha[p] - old;
                for (wi, zi) in w.iter_mut().zip(&z[p]) {
                    *wi += delta * zi;
                }
            }
        }
        if max_violation < cfg.tolerance {
            break;
        }
    }
    if w.iter().all(|&v| v == 0.0) {
        Form::Constant
    } else {
        Form::Linear { weights: w }
    }
}

fn solve_rbf(pairs: &[(Vec<f64>, Vec<f64>)], gamma: f64, cfg: &LearningConfig) -> Form {
    let n = pairs.len();
    let mut q = alloc::vec![0.0; n * n];
    for p in 0..n {
        for r in p..n {
            let (wp, bp) = &pairs[p];
            let (wr, br) = &pairs[r];
            let v = rbf(gamma, wp, wr) - rbf(gamma, wp, br) - rbf(gamma, bp, wr) + rbf(gamma, bp, br);
            q[p * n + r] = v;
            q[r * n + p] = v;
        }
    }
    let mut alpha = alloc::vec![0.0; n];
    let mut grad = alloc::vec![-1.0; n];
    for _ in 0..cfg.max_iterations {
        let mut max_violation: f64 = 0.0;
        for p in 0..n {
            let qpp = q[p * n + p];
            if qpp <= 1e-15 {
                continue;
            }
            let pg = projected_gradient(grad[p], alpha[p], cfg.c);
            max_violation = max_violation.max(libm::fabs(pg));
            if pg != 0.0 {
                let old = alpha[p];
                alpha[p] = (old - grad[p] / qpp).clamp(0.0, cfg.c);
                let delta = alpha[p] - old;
                for (r, g) in grad.iter_mut().enumerate() {
                    *g += delta * q[r * n + p];
                }
            }
        }
        if max_violation < cfg.tolerance {
            break;
        }
    }
    let expansion: Vec<(f64, Vec<f64>, Vec<f64>)> =
        alpha.iter().zip(pairs).filter(|(a, _)| **a > 0.0).map(|(a, (w, b))| (*a, w.clone(), b.clone())).collect();
    if expansion.is_empty() {
        Form::Constant
    } else {
        Form::Rbf { gamma, expansion }
    }
}

fn projected_gradient(g: f64, alpha: f64, c: f64) -> f64 {
    if alpha <= 0.0 {
        g.min(0.0)
    } else if alpha >= c {
        g.max(0.0)
    } else {
        g
    }
}

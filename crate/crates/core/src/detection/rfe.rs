use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Policy;
use crate::error::{Error, Result};
use crate::learning::RankedBatch;
use crate::linalg::{cholesky_solve, column_moments, dot};
use crate::types::ActiveMask;

/// Pooled samples plus the within-interaction preference pairs over them.
#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseData {
    /// One full objective vector per sample.
    pub rows: Vec<Vec<f64>>,
    /// `(better, worse)` row indices.
    pub pairs: Vec<(usize, usize)>,
}

impl PairwiseData {
    pub fn from_batches(batches: &[RankedBatch]) -> Self {
        let mut rows = Vec::new();
        let mut pairs = Vec::new();
        for b in batches {
            let offset = rows.len();
            rows.extend(b.vectors.iter().map(|v| v.values().to_vec()));
            pairs.extend(b.preference_pairs().map(|(i, j)| (offset + i, offset + j)));
        }
        Self { rows, pairs }
    }

    pub fn num_features(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

/// L2-regularized logistic model predicting which of two solutions ranks
/// better, from the difference of their standardized features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseLogistic {
    /// Objective indices used by the model.
    pub features: Vec<usize>,
    mean: Vec<f64>,
    scale: Vec<f64>,
    pub weights: Vec<f64>,
}

const NEWTON_ITERATIONS: usize = 100;

impl PairwiseLogistic {
    /// Fits on `features` with penalty `0.5 |w|^2 + C * log-loss`, `C = 1`.
    pub fn fit(data: &PairwiseData, features: &[usize]) -> Self {
        let dim = features.len();
        let cols: Vec<Vec<f64>> = data.rows.iter().map(|r| features.iter().map(|&f| r[f]).collect()).collect();
        let (mean, sd) = column_moments(&cols, dim);
        let scale: Vec<f64> = sd.iter().map(|&s| if s > 1e-12 { s } else { 0.0 }).collect();
        let mut model = Self { features: features.to_vec(), mean, scale, weights: alloc::vec![0.0; dim] };
        let z: Vec<Vec<f64>> =
            data.pairs.iter().map(|&(b, w)| model.difference(&data.rows[w], &data.rows[b], None)).collect();
        if z.is_empty() {
            return model;
        }
        let w = &mut model.weights;
        for _ in 0..NEWTON_ITERATIONS {
            let mut grad = w.clone();
            let mut hess = alloc::vec![0.0; dim * dim];
            for i in 0..dim {
                hess[i * dim + i] = 1.0;
            }
            for zp in &z {
                let margin = dot(w, zp);
                let s_neg = 1.0 / (1.0 + libm::exp(margin));
                let curvature = s_neg * (1.0 - s_neg);
                for i in 0..dim {
                    grad[i] -= zp[i] * s_neg;
                    for j in 0..dim {
                        hess[i * dim + j] += curvature * zp[i] * zp[j];
                    }
                }
            }
            let Some(step) = cholesky_solve(&hess, &grad, dim) else { break };
            let mut largest: f64 = 0.0;
            for (wi, si) in w.iter_mut().zip(&step) {
                *wi -= si;
                largest = largest.max(libm::fabs(*si));
            }
            if largest < 1e-10 {
                break;
            }
        }
        model
    }

    /// Standardized `worse - better` over the model features; `override_col`
    /// substitutes one feature's raw values for both rows.
    fn difference(&self, worse: &[f64], better: &[f64], override_col: Option<(usize, f64, f64)>) -> Vec<f64> {
        self.features
            .iter()
            .enumerate()
            .map(|(k, &f)| {
                if self.scale[k] == 0.0 {
                    return 0.0;
                }
                let (vw, vb) = match override_col {
                    Some((col, ow, ob)) if col == k => (ow, ob),
                    _ => (worse[f], better[f]),
                };
                (vw - vb) / self.scale[k]
            })
            .collect()
    }

    /// Fraction of preference pairs ordered correctly (strictly).
    pub fn accuracy(&self, data: &PairwiseData) -> f64 {
        self.accuracy_with(data, None)
    }

    /// Accuracy when model feature `position` takes the value of row
    /// `permutation[i]` in row `i`.
    fn accuracy_with(&self, data: &PairwiseData, permuted: Option<(usize, &[usize])>) -> f64 {
        if data.pairs.is_empty() {
            return 0.0;
        }
        let correct = data
            .pairs
            .iter()
            .filter(|&&(b, w)| {
                let over = permuted.map(|(k, perm)| {
                    let f = self.features[k];
                    (k, data.rows[perm[w]][f], data.rows[perm[b]][f])
                });
                dot(&self.weights, &self.difference(&data.rows[w], &data.rows[b], over)) > 0.0
            })
            .count();
        correct as f64 / data.pairs.len() as f64
    }
}

/// Importance of model feature `position`: accuracy with all features minus
/// the mean accuracy over the given row permutations of that feature's column.
/// May be negative. An identity permutation yields exactly zero.
pub fn feature_contribution(
    model: &PairwiseLogistic,
    data: &PairwiseData,
    position: usize,
    permutations: &[Vec<usize>],
) -> f64 {
    if permutations.is_empty() {
        return 0.0;
    }
    let base = model.accuracy(data);
    let permuted: f64 = permutations.iter().map(|perm| model.accuracy_with(data, Some((position, perm)))).sum::<f64>()
        / permutations.len() as f64;
    base - permuted
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfeOutcome {
    pub mask: ActiveMask,
    /// Last measured contribution per objective; `None` if never measured.
    pub contributions: Vec<Option<f64>>,
}

/// Recursive feature elimination on the pooled interaction data.
///
/// Repeatedly fits the pairwise model on the surviving objectives, measures
/// each one's contribution and drops the weakest, until the weakest contributes
/// more than `tau`, `k` objectives remain, or only two remain.
pub fn rfe_select(batches: &[RankedBatch], policy: Policy, permutations: usize, seed: u64) -> Result<RfeOutcome> {
    let data = PairwiseData::from_batches(batches);
    if data.rows.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: data.rows.len() });
    }
    let m = data.num_features();
    if m < 2 {
        return Err(Error::Config("selection needs at least two objectives".into()));
    }
    if let Policy::FixedK(k) = policy {
        if k < 2 {
            return Err(Error::Config(alloc::format!("k must be at least 2, got {k}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = data.rows.len();
    let mut surviving: Vec<usize> = (0..m).collect();
    let mut contributions = alloc::vec![None; m];
    loop {
        let size_reached = match policy {
            Policy::FixedK(k) => surviving.len() <= k,
            Policy::Threshold(_) => false,
        };
        if size_reached || surviving.len() <= 2 {
            break;
        }
        let model = PairwiseLogistic::fit(&data, &surviving);
        let mut weakest = (0, f64::INFINITY);
        for pos in 0..surviving.len() {
            let perms: Vec<Vec<usize>> = (0..permutations)
                .map(|_| {
                    let mut p: Vec<usize> = (0..n).collect();
                    p.shuffle(&mut rng);
                    p
                })
                .collect();
            let phi = feature_contribution(&model, &data, pos, &perms);
            contributions[surviving[pos]] = Some(phi);
            if phi < weakest.1 {
                weakest = (pos, phi);
            }
        }
        if let Policy::Threshold(tau) = policy {
            if weakest.1 > tau {
                break;
            }
        }
        surviving.remove(weakest.0);
    }
    Ok(RfeOutcome { mask: ActiveMask::from_indices(m, &surviving)?, contributions })
}

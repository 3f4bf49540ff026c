//! Detection of the objectives that explain the decision maker's rankings.
//!
//! Two selectors are provided: a univariate F-test on the correlation between
//! each objective and the ranks, and recursive feature elimination driven by a
//! pairwise logistic model. Each runs under a fixed-count (`k`) or threshold
//! (`tau`) policy, giving the four variants k-HD, τ-HD, k-HDR and τ-HDR.

mod rfe;
mod univariate;

pub use rfe::{feature_contribution, rfe_select, PairwiseData, PairwiseLogistic, RfeOutcome};
pub use univariate::{select_univariate, univariate_scores, UnivariateScores, P_VALUE_FLOOR};

use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learning::{pool, RankedBatch};
use crate::types::ActiveMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Univariate,
    Rfe,
}

/// How many objectives survive selection.
///
/// For the univariate method `tau` is a p-value threshold: larger values keep
/// more objectives and `tau >= 1` keeps all of them. For RFE `tau` is the
/// contribution an objective must exceed to stop elimination, so larger values
/// keep fewer objectives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    FixedK(usize),
    Threshold(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DetectionSpec", into = "DetectionSpec")]
pub struct DetectionConfig {
    pub method: Method,
    pub policy: Policy,
    /// Column permutations averaged per RFE contribution.
    pub permutations: usize,
}

impl DetectionConfig {
    pub fn new(method: Method, policy: Policy) -> Result<Self> {
        let cfg = Self { method, policy, permutations: 10 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        match self.policy {
            Policy::FixedK(k) if k < 2 => Err(Error::Config(format!("k must be at least 2, got {k}"))),
            Policy::Threshold(tau) if self.method == Method::Univariate && !(tau > 0.0 && tau <= 1.0) => {
                Err(Error::Config(format!("tau must lie in (0, 1], got {tau}")))
            }
            Policy::Threshold(tau) if !tau.is_finite() => Err(Error::Config(format!("tau must be finite, got {tau}"))),
            _ if self.method == Method::Rfe && self.permutations == 0 => {
                Err(Error::Config("RFE needs at least one permutation".into()))
            }
            _ => Ok(()),
        }
    }

    /// Short variant label: `k-HD`, `tau-HD`, `k-HDR` or `tau-HDR`.
    pub fn variant_name(&self) -> &'static str {
        match (self.method, self.policy) {
            (Method::Univariate, Policy::FixedK(_)) => "k-HD",
            (Method::Univariate, Policy::Threshold(_)) => "tau-HD",
            (Method::Rfe, Policy::FixedK(_)) => "k-HDR",
            (Method::Rfe, Policy::Threshold(_)) => "tau-HDR",
        }
    }
}

/// Serialized form with flat `k` / `tau` fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionSpec {
    pub method: Method,
    pub policy: PolicyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(default = "default_permutations")]
    pub permutations: usize,
}

fn default_permutations() -> usize {
    10
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    FixedK,
    Threshold,
}

impl TryFrom<DetectionSpec> for DetectionConfig {
    type Error = Error;
    fn try_from(s: DetectionSpec) -> Result<Self> {
        let policy = match (s.policy, s.k, s.tau) {
            (PolicyKind::FixedK, Some(k), _) => Policy::FixedK(k),
            (PolicyKind::Threshold, _, Some(tau)) => Policy::Threshold(tau),
            (PolicyKind::FixedK, None, _) => return Err(Error::Config("fixed_k policy needs k".into())),
            (PolicyKind::Threshold, _, None) => return Err(Error::Config("threshold policy needs tau".into())),
        };
        let cfg = Self { method: s.method, policy, permutations: s.permutations };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<DetectionConfig> for DetectionSpec {
    fn from(c: DetectionConfig) -> Self {
        let (policy, k, tau) = match c.policy {
            Policy::FixedK(k) => (PolicyKind::FixedK, Some(k), None),
            Policy::Threshold(t) => (PolicyKind::Threshold, None, Some(t)),
        };
        Self { method: c.method, policy, k, tau, permutations: c.permutations }
    }
}

/// Result of one detection step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub mask: ActiveMask,
    /// Univariate p-values per objective.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_values: Option<Vec<f64>>,
    /// RFE contribution per objective, as last measured before elimination.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contributions: Option<Vec<Option<f64>>>,
}

/// Runs the configured selector on the pooled interaction data. `seed` drives
/// the RFE permutations and is ignored by the univariate method.
pub fn detect(batches: &[RankedBatch], cfg: &DetectionConfig, seed: u64) -> Result<Detection> {
    cfg.validate()?;
    match cfg.method {
        Method::Univariate => {
            let (t, r) = pool(batches);
            let scores = univariate_scores(&t, &r)?;
            let mask = select_univariate(&scores, cfg.policy)?;
            Ok(Detection { mask, p_values: Some(scores.p_value), contributions: None })
        }
        Method::Rfe => {
            let out = rfe_select(batches, cfg.policy, cfg.permutations, seed)?;
            Ok(Detection { mask: out.mask, p_values: None, contributions: Some(out.contributions) })
        }
    }
}

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Policy;
use crate::error::{Error, Result};
use crate::stats::{f_dist_sf, pearson};
use crate::types::{ActiveMask, ObjectiveVector};

/// p-values are clamped from below so that extreme correlations still order
/// deterministically.
pub const P_VALUE_FLOOR: f64 = 1e-300;

/// Per-objective correlation with the ranks, F-statistic and p-value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnivariateScores {
    pub rho: Vec<f64>,
    pub f_stat: Vec<f64>,
    pub p_value: Vec<f64>,
}

/// F-test of each objective column against the rank vector.
///
/// `F = r^2 / (1 - r^2) * (N - 2)` with `r` the Pearson correlation, and the
/// p-value is the upper tail of `F(1, N - 2)`. A column (or rank vector) with
/// zero variance scores `r = 0, F = 0, p = 1`.
pub fn univariate_scores(t: &[ObjectiveVector], ranks: &[u32]) -> Result<UnivariateScores> {
    if t.len() != ranks.len() {
        return Err(Error::Dimension { expected: t.len(), got: ranks.len() });
    }
    if t.len() < 3 {
        return Err(Error::InsufficientData { needed: 3, got: t.len() });
    }
    let m = t[0].len();
    if let Some(v) = t.iter().find(|v| v.len() != m) {
        return Err(Error::Dimension { expected: m, got: v.len() });
    }
    let dof = (t.len() - 2) as f64;
    let r: Vec<f64> = ranks.iter().map(|&x| x as f64).collect();
    let mut scores =
        UnivariateScores { rho: Vec::with_capacity(m), f_stat: Vec::with_capacity(m), p_value: Vec::with_capacity(m) };
    let mut column = alloc::vec![0.0; t.len()];
    for i in 0..m {
        for (c, v) in column.iter_mut().zip(t) {
            *c = v[i];
        }
        let rho = pearson(&column, &r).unwrap_or(0.0);
        let r2 = rho * rho;
        let f = if r2 >= 1.0 { f64::INFINITY } else { r2 / (1.0 - r2) * dof };
        let p = f_dist_sf(f, 1.0, dof).max(P_VALUE_FLOOR);
        scores.rho.push(rho);
        scores.f_stat.push(f);
        scores.p_value.push(p);
    }
    Ok(scores)
}

/// Turns p-values into an activity mask.
///
/// Fixed `k` keeps the `k` smallest p-values (ties to the smaller index).
/// A threshold keeps every objective with `p < tau`, and every objective when
/// `tau >= 1`; when fewer than two pass, the two lowest p-values are kept.
pub fn select_univariate(scores: &UnivariateScores, policy: Policy) -> Result<ActiveMask> {
    let p = &scores.p_value;
    let m = p.len();
    if m < 2 {
        return Err(Error::Config("selection needs at least two objectives".into()));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]).then(a.cmp(&b)));
    let chosen: Vec<usize> = match policy {
        Policy::FixedK(k) => {
            if k < 2 || k > m {
                return Err(Error::Config(alloc::format!("k = {k} outside [2, {m}]")));
            }
            order[..k].to_vec()
        }
        Policy::Threshold(tau) if tau >= 1.0 => (0..m).collect(),
        Policy::Threshold(tau) => {
            let passing: Vec<usize> = (0..m).filter(|&i| p[i] < tau).collect();
            if passing.len() >= 2 {
                passing
            } else {
                order[..2].to_vec()
            }
        }
    };
    ActiveMask::from_indices(m, &chosen)
}

use alloc::format;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Encoding, Problem};
use crate::error::{Error, Result};
use crate::stats::normal_cdf;
use crate::types::Decision;

/// Largest supported epistasis degree (tables hold `2^(K+1)` entries per bit).
pub const MAX_K: usize = 20;

/// Multi-objective NK landscape with correlated contributions.
///
/// Every objective shares the same random epistatic links. For each bit
/// position and each of the `2^(K+1)` neighbourhood configurations, the `m`
/// contributions are drawn jointly from a normal distribution with constant
/// pairwise correlation `rho` and pushed through the normal CDF into `[0, 1]`.
/// Fitness is the mean contribution; [`Problem::evaluate`] returns
/// `1 - fitness` so that the landscape is minimized like the other problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmnkInstance {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub seed: u64,
    /// `links[j]` holds the `K` neighbours of bit `j`, in table-index order.
    pub links: Vec<Vec<usize>>,
    /// `tables[objective][bit][configuration]`.
    pub tables: Vec<Vec<Vec<f64>>>,
}

impl RmnkInstance {
    pub fn generate(m: usize, n: usize, k: usize, rho: f64, seed: u64) -> Result<Self> {
        validate_parameters(m, n, k, rho)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let links: Vec<Vec<usize>> = (0..n)
            .map(|j| sample(&mut rng, n - 1, k).into_iter().map(|i| if i >= j { i + 1 } else { i }).collect())
            .collect();

        // Symmetric square root of the constant-correlation matrix:
        // (a I + b 11^T)^2 has unit diagonal and off-diagonal rho.
        let a = libm::sqrt(1.0 - rho);
        let b = (libm::sqrt(1.0 + (m as f64 - 1.0) * rho) - a) / m as f64;

        let configs = 1usize << (k + 1);
        let mut tables = alloc::vec![alloc::vec![alloc::vec![0.0; configs]; n]; m];
        let mut e = alloc::vec![0.0; m];
        // all objectives of one (bit, configuration) cell are drawn together
        #[allow(clippy::needless_range_loop)]
        for j in 0..n {
            for c in 0..configs {
                for v in e.iter_mut() {
                    *v = StandardNormal.sample(&mut rng);
                }
                let s: f64 = e.iter().sum();
                for (obj, ei) in e.iter().enumerate() {
                    tables[obj][j][c] = normal_cdf(a * ei + b * s);
                }
            }
        }
        Ok(Self { m, n, k, rho, seed, links, tables })
    }

    /// Checks the structural invariants of a (possibly deserialized) instance.
    pub fn validate(&self) -> Result<()> {
        validate_parameters(self.m, self.n, self.k, self.rho)?;
        if self.links.len() != self.n {
            return Err(Error::Parameter("links must have one entry per bit".into()));
        }
        for (j, l) in self.links.iter().enumerate() {
            let mut seen = l.clone();
            seen.sort_unstable();
            seen.dedup();
            if l.len() != self.k || seen.len() != self.k || l.iter().any(|&i| i >= self.n || i == j) {
                return Err(Error::Parameter(format!("bit {j} must have exactly {} distinct neighbours", self.k)));
            }
        }
        let configs = 1usize << (self.k + 1);
        let shape_ok = self.tables.len() == self.m
            && self.tables.iter().all(|t| t.len() == self.n && t.iter().all(|row| row.len() == configs));
        if !shape_ok {
            return Err(Error::Parameter("contribution tables have the wrong shape".into()));
        }
        if self.tables.iter().flatten().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Parameter("contributions must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// NK fitness (to be maximized) of objective `objective`.
    pub fn fitness(&self, bits: &[bool], objective: usize) -> Result<f64> {
        if bits.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: bits.len() });
        }
        if objective >= self.m {
            return Err(Error::ObjectiveIndex { index: objective, m: self.m });
        }
        let table = &self.tables[objective];
        let total: f64 = (0..self.n).map(|j| table[j][self.configuration(bits, j)]).sum();
        Ok(total / self.n as f64)
    }

    /// Table index of bit `j`: the bit itself is the most significant digit,
    /// followed by its neighbours in link order.
    fn configuration(&self, bits: &[bool], j: usize) -> usize {
        self.links[j].iter().fold(bits[j] as usize, |acc, &l| (acc << 1) | bits[l] as usize)
    }
}

fn validate_parameters(m: usize, n: usize, k: usize, rho: f64) -> Result<()> {
    if m < 2 {
        return Err(Error::Parameter(format!("rho-MNK needs m >= 2, got {m}")));
    }
    if n == 0 || k >= n {
        return Err(Error::Parameter(format!("need K < n, got K = {k}, n = {n}")));
    }
    if k > MAX_K {
        return Err(Error::Parameter(format!("K = {k} exceeds the supported maximum {MAX_K}")));
    }
    let min_rho = -1.0 / (m as f64 - 1.0);
    if !rho.is_finite() || rho > 1.0 || rho < min_rho - 1e-12 {
        return Err(Error::Parameter(format!("rho = {rho} outside [{min_rho}, 1] for m = {m}")));
    }
    Ok(())
}

impl Problem for RmnkInstance {
    fn num_objectives(&self) -> usize {
        self.m
    }

    fn encoding(&self) -> Encoding {
        Encoding::Binary { n: self.n }
    }

    fn evaluate(&self, x: &Decision, objective: usize) -> Result<f64> {
        let Decision::Binary(bits) = x else {
            return Err(Error::Domain("rho-MNK expects a bit-string".into()));
        };
        Ok(1.0 - self.fitness(bits, objective)?)
    }
}

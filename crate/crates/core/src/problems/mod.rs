//! Benchmark problems: bounded DTLZ1/2/7 and correlated multi-objective NK
//! landscapes. All objectives are minimized.

mod dtlz;
mod rmnk;

pub use dtlz::{Dtlz, DtlzVariant};
pub use rmnk::RmnkInstance;

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Decision;

/// Search space of a problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Encoding {
    /// `n` reals, each in `[lower, upper]`.
    Real { n: usize, lower: f64, upper: f64 },
    /// Bit-strings of length `n`.
    Binary { n: usize },
}

impl Encoding {
    pub fn dimension(&self) -> usize {
        match *self {
            Encoding::Real { n, .. } | Encoding::Binary { n } => n,
        }
    }
}

/// A multi-objective problem whose objectives can be evaluated one at a time.
pub trait Problem {
    fn num_objectives(&self) -> usize;
    fn encoding(&self) -> Encoding;
    /// Computes `f_objective(x)` for a 0-based objective index.
    fn evaluate(&self, x: &Decision, objective: usize) -> Result<f64>;
}

impl<P: Problem + ?Sized> Problem for &P {
    fn num_objectives(&self) -> usize {
        (**self).num_objectives()
    }
    fn encoding(&self) -> Encoding {
        (**self).encoding()
    }
    fn evaluate(&self, x: &Decision, objective: usize) -> Result<f64> {
        (**self).evaluate(x, objective)
    }
}

/// Serializable description of a benchmark instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemSpec {
    Dtlz {
        variant: DtlzVariant,
        m: usize,
        /// Defaults to the variant's conventional size.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
    },
    Rmnk {
        m: usize,
        /// Defaults to 10, 20 or 30 bits for 4, 10 or 20 objectives.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n: Option<usize>,
        k: usize,
        rho: f64,
        seed: u64,
    },
}

impl ProblemSpec {
    pub fn num_objectives(&self) -> usize {
        match *self {
            ProblemSpec::Dtlz { m, .. } | ProblemSpec::Rmnk { m, .. } => m,
        }
    }

    /// Search space implied by the spec, without generating the instance.
    pub fn bounds(&self) -> Result<Encoding> {
        match *self {
            ProblemSpec::Dtlz { variant, m, n } => {
                Ok(Dtlz::new(variant, m, n.unwrap_or_else(|| variant.default_dimension(m)))?.encoding())
            }
            ProblemSpec::Rmnk { m, n, .. } => Ok(Encoding::Binary { n: rmnk_dimension(m, n)? }),
        }
    }

    /// Builds the instance; NK landscapes are generated from their seed.
    pub fn instantiate(&self) -> Result<ProblemInstance> {
        match *self {
            ProblemSpec::Dtlz { variant, m, n } => {
                Ok(ProblemInstance::Dtlz(Dtlz::new(variant, m, n.unwrap_or_else(|| variant.default_dimension(m)))?))
            }
            ProblemSpec::Rmnk { m, n, k, rho, seed } => {
                Ok(ProblemInstance::Rmnk(RmnkInstance::generate(m, rmnk_dimension(m, n)?, k, rho, seed)?))
            }
        }
    }
}

fn rmnk_dimension(m: usize, n: Option<usize>) -> Result<usize> {
    match (n, m) {
        (Some(n), _) => Ok(n),
        (None, 4) => Ok(10),
        (None, 10) => Ok(20),
        (None, 20) => Ok(30),
        (None, m) => {
            Err(Error::Parameter(format!("no default bit-string length for {m} objectives; set n explicitly")))
        }
    }
}

/// A concrete benchmark instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemInstance {
    Dtlz(Dtlz),
    Rmnk(RmnkInstance),
}

impl Problem for ProblemInstance {
    fn num_objectives(&self) -> usize {
        match self {
            ProblemInstance::Dtlz(p) => p.num_objectives(),
            ProblemInstance::Rmnk(p) => p.num_objectives(),
        }
    }

    fn encoding(&self) -> Encoding {
        match self {
            ProblemInstance::Dtlz(p) => p.encoding(),
            ProblemInstance::Rmnk(p) => p.encoding(),
        }
    }

    fn evaluate(&self, x: &Decision, objective: usize) -> Result<f64> {
        match self {
            ProblemInstance::Dtlz(p) => p.evaluate(x, objective),
            ProblemInstance::Rmnk(p) => p.evaluate(x, objective),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_bounds() {
        let spec = ProblemSpec::Dtlz { variant: DtlzVariant::Dtlz1, m: 4, n: None };
        assert_eq!(spec.bounds().unwrap(), Encoding::Real { n: 8, lower: 0.25, upper: 0.75 });
        let spec = ProblemSpec::Dtlz { variant: DtlzVariant::Dtlz2, m: 10, n: None };
        assert_eq!(spec.bounds().unwrap(), Encoding::Real { n: 19, lower: 0.0, upper: 1.0 });
        let spec = ProblemSpec::Dtlz { variant: DtlzVariant::Dtlz7, m: 4, n: None };
        assert_eq!(spec.bounds().unwrap().dimension(), 23);
        for (m, n) in [(4, 10), (10, 20), (20, 30)] {
            let spec = ProblemSpec::Rmnk { m, n: None, k: 1, rho: 0.0, seed: 0 };
            assert_eq!(spec.bounds().unwrap(), Encoding::Binary { n });
        }
        let spec = ProblemSpec::Rmnk { m: 3, n: None, k: 1, rho: 0.0, seed: 0 };
        assert!(spec.bounds().is_err());
    }
}

//! Variation operators: SBX + polynomial mutation for reals, uniform crossover
//! + bit-flip mutation for bit-strings.

use alloc::vec::Vec;

use libm::pow;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::Encoding;
use crate::types::Decision;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VariationConfig {
    pub sbx_probability: f64,
    pub sbx_eta: f64,
    /// Per-variable probability of polynomial mutation.
    pub mutation_probability: f64,
    pub mutation_eta: f64,
    pub uniform_crossover_probability: f64,
    /// Per-bit flip probability; `None` means `1 / n`.
    pub bit_flip_rate: Option<f64>,
}

impl Default for VariationConfig {
    fn default() -> Self {
        Self {
            sbx_probability: 0.95,
            sbx_eta: 10.0,
            mutation_probability: 0.01,
            mutation_eta: 50.0,
            uniform_crossover_probability: 0.9,
            bit_flip_rate: None,
        }
    }
}

/// Produces two children from two parents of the given encoding.
pub fn variation<R: Rng + ?Sized>(
    p1: &Decision,
    p2: &Decision,
    encoding: &Encoding,
    cfg: &VariationConfig,
    rng: &mut R,
) -> Result<(Decision, Decision)> {
    match (p1, p2, *encoding) {
        (Decision::Real(a), Decision::Real(b), Encoding::Real { n, lower, upper }) if a.len() == n && b.len() == n => {
            let (mut c1, mut c2) = sbx_crossover(a, b, lower, upper, cfg.sbx_probability, cfg.sbx_eta, rng);
            polynomial_mutation(&mut c1, lower, upper, cfg.mutation_probability, cfg.mutation_eta, rng);
            polynomial_mutation(&mut c2, lower, upper, cfg.mutation_probability, cfg.mutation_eta, rng);
            Ok((Decision::Real(c1), Decision::Real(c2)))
        }
        (Decision::Binary(a), Decision::Binary(b), Encoding::Binary { n }) if a.len() == n && b.len() == n => {
            let (mut c1, mut c2) = uniform_crossover(a, b, cfg.uniform_crossover_probability, rng);
            let rate = cfg.bit_flip_rate.unwrap_or(1.0 / n as f64);
            bit_flip_mutation(&mut c1, rate, rng);
            bit_flip_mutation(&mut c2, rate, rng);
            Ok((Decision::Binary(c1), Decision::Binary(c2)))
        }
        _ => Err(Error::Domain("parents do not match the problem encoding".into())),
    }
}

/// Bounded simulated binary crossover.
pub fn sbx_crossover<R: Rng + ?Sized>(
    a: &[f64],
    b: &[f64],
    lower: f64,
    upper: f64,
    probability: f64,
    eta: f64,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    if rng.random::<f64>() >= probability {
        return (c1, c2);
    }
    let exponent = 1.0 / (eta + 1.0);
    let spread = |beta: f64, u: f64| {
        let alpha = 2.0 - pow(beta, -(eta + 1.0));
        if u <= 1.0 / alpha {
            pow(u * alpha, exponent)
        } else {
            pow(1.0 / (2.0 - u * alpha), exponent)
        }
    };
    for i in 0..a.len() {
        if rng.random::<f64>() >= 0.5 || (a[i] - b[i]).abs() <= 1e-14 {
            continue;
        }
        let (y1, y2) = if a[i] < b[i] { (a[i], b[i]) } else { (b[i], a[i]) };
        let u: f64 = rng.random();
        let span = y2 - y1;
        let bq1 = spread(1.0 + 2.0 * (y1 - lower) / span, u);
        let bq2 = spread(1.0 + 2.0 * (upper - y2) / span, u);
        let lo_child = (0.5 * ((y1 + y2) - bq1 * span)).clamp(lower, upper);
        let hi_child = (0.5 * ((y1 + y2) + bq2 * span)).clamp(lower, upper);
        if rng.random::<f64>() < 0.5 {
            c1[i] = hi_child;
            c2[i] = lo_child;
        } else {
            c1[i] = lo_child;
            c2[i] = hi_child;
        }
    }
    (c1, c2)
}

/// Deb's bounded polynomial mutation, applied per variable.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    x: &mut [f64],
    lower: f64,
    upper: f64,
    probability: f64,
    eta: f64,
    rng: &mut R,
) {
    let span = upper - lower;
    let exponent = 1.0 / (eta + 1.0);
    for v in x.iter_mut() {
        if rng.random::<f64>() >= probability {
            continue;
        }
        let d1 = (*v - lower) / span;
        let d2 = (upper - *v) / span;
        let u: f64 = rng.random();
        let dq = if u < 0.5 {
            let val = 2.0 * u + (1.0 - 2.0 * u) * pow(1.0 - d1, eta + 1.0);
            pow(val, exponent) - 1.0
        } else {
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * pow(1.0 - d2, eta + 1.0);
            1.0 - pow(val, exponent)
        };
        *v = (*v + dq * span).clamp(lower, upper);
    }
}

/// With `probability`, swaps each bit position between the parents with
/// probability one half.
pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &[bool],
    b: &[bool],
    probability: f64,
    rng: &mut R,
) -> (Vec<bool>, Vec<bool>) {
    let mut c1 = a.to_vec();
    let mut c2 = b.to_vec();
    if rng.random::<f64>() < probability {
        for i in 0..a.len() {
            if rng.random::<bool>() {
                core::mem::swap(&mut c1[i], &mut c2[i]);
            }
        }
    }
    (c1, c2)
}

pub fn bit_flip_mutation<R: Rng + ?Sized>(bits: &mut [bool], rate: f64, rng: &mut R) {
    for b in bits.iter_mut() {
        if rng.random::<f64>() < rate {
            *b = !*b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sbx_without_crossover_copies_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = [0.1, 0.2, 0.3];
        let b = [0.9, 0.8, 0.7];
        let (c1, c2) = sbx_crossover(&a, &b, 0.0, 1.0, 0.0, 10.0, &mut rng);
        assert_eq!((c1.as_slice(), c2.as_slice()), (&a[..], &b[..]));
    }

    #[test]
    fn sbx_children_stay_in_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let a: Vec<f64> = (0..5).map(|_| rng.random_range(0.25..=0.75)).collect();
            let b: Vec<f64> = (0..5).map(|_| rng.random_range(0.25..=0.75)).collect();
            let (mut c1, c2) = sbx_crossover(&a, &b, 0.25, 0.75, 1.0, 10.0, &mut rng);
            polynomial_mutation(&mut c1, 0.25, 0.75, 1.0, 50.0, &mut rng);
            assert!(c1.iter().chain(&c2).all(|v| (0.25..=0.75).contains(v)));
        }
    }

    #[test]
    fn uniform_crossover_takes_each_bit_from_one_parent() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let zeros = vec![false; 32];
        let ones = vec![true; 32];
        for _ in 0..50 {
            let (c1, c2) = uniform_crossover(&zeros, &ones, 1.0, &mut rng);
            assert!(c1.iter().zip(&c2).all(|(x, y)| x != y));
        }
    }

    #[test]
    fn mismatched_encoding_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = variation(
            &Decision::Binary(vec![true]),
            &Decision::Real(vec![0.5]),
            &Encoding::Binary { n: 1 },
            &VariationConfig::default(),
            &mut rng,
        );
        assert!(r.is_err());
    }
}

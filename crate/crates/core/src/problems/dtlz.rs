use alloc::format;
use core::f64::consts::PI;

use libm::{cos, sin};
use serde::{Deserialize, Serialize};

use super::{Encoding, Problem};
use crate::error::{Error, Result};
use crate::types::Decision;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DtlzVariant {
    Dtlz1,
    Dtlz2,
    Dtlz7,
}

impl DtlzVariant {
    /// `m + 4`, `m + 9` and `m + 19` decision variables respectively.
    pub fn default_dimension(self, m: usize) -> usize {
        match self {
            DtlzVariant::Dtlz1 => m + 4,
            DtlzVariant::Dtlz2 => m + 9,
            DtlzVariant::Dtlz7 => m + 19,
        }
    }
}

/// DTLZ instance with the domain modifications that keep projected fronts from
/// collapsing: DTLZ1 is bounded to `[0.25, 0.75]`, DTLZ2 maps every variable
/// through `x / 2 + 0.25` before evaluation, DTLZ7 is unmodified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dtlz {
    pub variant: DtlzVariant,
    pub m: usize,
    pub n: usize,
}

impl Dtlz {
    pub fn new(variant: DtlzVariant, m: usize, n: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Parameter(format!("DTLZ needs m >= 2, got {m}")));
        }
        if n < m {
            return Err(Error::Parameter(format!("DTLZ needs n >= m, got n = {n}, m = {m}")));
        }
        Ok(Self { variant, m, n })
    }

    pub fn with_default_dimension(variant: DtlzVariant, m: usize) -> Result<Self> {
        Self::new(variant, m, variant.default_dimension(m))
    }

    fn bounds(&self) -> (f64, f64) {
        match self.variant {
            DtlzVariant::Dtlz1 => (0.25, 0.75),
            DtlzVariant::Dtlz2 | DtlzVariant::Dtlz7 => (0.0, 1.0),
        }
    }

    fn check(&self, x: &Decision, objective: usize) -> Result<()> {
        let Decision::Real(x) = x else {
            return Err(Error::Domain("DTLZ expects a real-valued decision vector".into()));
        };
        if x.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: x.len() });
        }
        if objective >= self.m {
            return Err(Error::ObjectiveIndex { index: objective, m: self.m });
        }
        let (lo, hi) = self.bounds();
        if let Some(i) = x.iter().position(|v| !(lo..=hi).contains(v)) {
            return Err(Error::Domain(format!("x[{i}] = {} outside [{lo}, {hi}]", x[i])));
        }
        Ok(())
    }

    fn dtlz1(&self, x: &[f64], i: usize) -> f64 {
        let m = self.m;
        let tail = &x[m - 1..];
        let g = 100.0
            * (tail.len() as f64
                + tail.iter().map(|v| (v - 0.5) * (v - 0.5) - cos(20.0 * PI * (v - 0.5))).sum::<f64>());
        let mut f = 0.5 * (1.0 + g);
        f *= x[..m - 1 - i].iter().product::<f64>();
        if i > 0 {
            f *= 1.0 - x[m - 1 - i];
        }
        f
    }

    fn dtlz2(&self, x: &[f64], i: usize) -> f64 {
        let m = self.m;
        let map = |v: f64| v / 2.0 + 0.25;
        let g: f64 = x[m - 1..].iter().map(|&v| (map(v) - 0.5) * (map(v) - 0.5)).sum();
        let mut f = 1.0 + g;
        for &v in &x[..m - 1 - i] {
            f *= cos(map(v) * PI / 2.0);
        }
        if i > 0 {
            f *= sin(map(x[m - 1 - i]) * PI / 2.0);
        }
        f
    }

    fn dtlz7(&self, x: &[f64], i: usize) -> f64 {
        let m = self.m;
        if i < m - 1 {
            return x[i];
        }
        let tail = &x[m - 1..];
        let g = 1.0 + 9.0 * tail.iter().sum::<f64>() / tail.len() as f64;
        let h = m as f64 - x[..m - 1].iter().map(|&f| f / (1.0 + g) * (1.0 + sin(3.0 * PI * f))).sum::<f64>();
        (1.0 + g) * h
    }
}

impl Problem for Dtlz {
    fn num_objectives(&self) -> usize {
        self.m
    }

    fn encoding(&self) -> Encoding {
        let (lower, upper) = self.bounds();
        Encoding::Real { n: self.n, lower, upper }
    }

    fn evaluate(&self, x: &Decision, objective: usize) -> Result<f64> {
        self.check(x, objective)?;
        let Decision::Real(x) = x else { unreachable!() };
        Ok(match self.variant {
            DtlzVariant::Dtlz1 => self.dtlz1(x, objective),
            DtlzVariant::Dtlz2 => self.dtlz2(x, objective),
            DtlzVariant::Dtlz7 => self.dtlz7(x, objective),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;

    fn eval_all(p: &Dtlz, x: &[f64]) -> Vec<f64> {
        let d = Decision::Real(x.to_vec());
        (0..p.m).map(|i| p.evaluate(&d, i).unwrap()).collect()
    }

    #[test]
    fn dtlz1_centre_point() {
        let p = Dtlz::with_default_dimension(DtlzVariant::Dtlz1, 4).unwrap();
        assert_eq!(p.n, 8);
        let f = eval_all(&p, &[0.5; 8]);
        let expected = [0.0625, 0.0625, 0.125, 0.25];
        for (a, b) in f.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{f:?}");
        }
        assert!((f.iter().sum::<f64>() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dtlz2_unit_sphere() {
        let p = Dtlz::with_default_dimension(DtlzVariant::Dtlz2, 4).unwrap();
        let mut x = vec![0.5; p.n];
        x[0] = 0.1;
        x[1] = 0.9;
        x[2] = 0.33;
        let f = eval_all(&p, &x);
        assert!((f.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain_is_enforced() {
        let p = Dtlz::with_default_dimension(DtlzVariant::Dtlz1, 4).unwrap();
        let err = p.evaluate(&Decision::Real(vec![0.1; 8]), 0).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let p = Dtlz::with_default_dimension(DtlzVariant::Dtlz2, 4).unwrap();
        assert!(p.evaluate(&Decision::Real(vec![1.5; 13]), 0).is_err());
        assert!(p.evaluate(&Decision::Real(vec![0.5; 12]), 0).is_err());
        assert!(p.evaluate(&Decision::Real(vec![0.5; 13]), 4).is_err());
        assert!(p.evaluate(&Decision::Binary(vec![true; 13]), 0).is_err());
    }
}

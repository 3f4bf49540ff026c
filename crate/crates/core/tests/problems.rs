use hdo_core::problems::{Dtlz, DtlzVariant, Encoding, Problem, ProblemSpec, RmnkInstance};
use hdo_core::{Decision, Error};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn eval_all<P: Problem>(p: &P, x: &Decision) -> Vec<f64> {
    (0..p.num_objectives()).map(|i| p.evaluate(x, i).unwrap()).collect()
}

/// Reference DTLZ7 written from the textbook definition.
fn dtlz7_reference(x: &[f64], m: usize) -> Vec<f64> {
    let k = x.len() - m + 1;
    let g = 1.0 + 9.0 / k as f64 * x[m - 1..].iter().sum::<f64>();
    let mut f: Vec<f64> = x[..m - 1].to_vec();
    let h = m as f64 - f.iter().map(|fi| fi / (1.0 + g) * (1.0 + (3.0 * std::f64::consts::PI * fi).sin())).sum::<f64>();
    f.push((1.0 + g) * h);
    f
}

proptest! {
    #[test]
    fn dtlz1_front_sums_to_half(m in 2usize..12, head in proptest::collection::vec(0.25f64..=0.75, 11)) {
        let p = Dtlz::with_default_dimension(DtlzVariant::Dtlz1, m).unwrap();
        let mut x = head[..m - 1].to_vec();
        x.resize(p.n, 0.5);
        let f = eval_all(&p, &Decision::Real(x));
        prop_assert!((f.iter().sum::<f64>() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn dtlz2_front_is_unit_sphere(m in 2usize..12, head in proptest::collection::vec(0.0f64..=1.0, 11)) {
        let p = Dtlz::with_default_dimension(DtlzVariant::Dtlz2, m).unwrap();
        let mut x = head[..m - 1].to_vec();
        // raw 0.5 maps to 0.5, where the distance term vanishes
        x.resize(p.n, 0.5);
        let f = eval_all(&p, &Decision::Real(x));
        prop_assert!((f.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dtlz7_matches_reference(m in 2usize..8, raw in proptest::collection::vec(0.0f64..=1.0, 27)) {
        let p = Dtlz::with_default_dimension(DtlzVariant::Dtlz7, m).unwrap();
        let x = raw[..p.n].to_vec();
        let f = eval_all(&p, &Decision::Real(x.clone()));
        for (a, b) in f.iter().zip(dtlz7_reference(&x, m)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn dtlz1_bounds_are_enforced() {
    let p = Dtlz::with_default_dimension(DtlzVariant::Dtlz1, 4).unwrap();
    assert_eq!(p.encoding(), Encoding::Real { n: 8, lower: 0.25, upper: 0.75 });
    let mut x = vec![0.5; 8];
    x[0] = 0.1;
    assert!(matches!(p.evaluate(&Decision::Real(x), 0), Err(Error::Domain(_))));
}

/// Fitness recomputed straight from the published links and tables.
fn rmnk_reference(inst: &RmnkInstance, bits: &[bool], obj: usize) -> f64 {
    let mut total = 0.0;
    for j in 0..inst.n {
        let mut idx = bits[j] as usize;
        for &l in &inst.links[j] {
            idx = idx * 2 + bits[l] as usize;
        }
        total += inst.tables[obj][j][idx];
    }
    total / inst.n as f64
}

#[test]
fn rmnk_exhaustive_oracle() {
    for (n, k, rho) in [(10, 1, 0.0), (12, 3, 0.5), (11, 2, -0.2)] {
        let inst = RmnkInstance::generate(3, n, k, rho, 7).unwrap();
        inst.validate().unwrap();
        for code in 0u32..(1 << n) {
            let bits: Vec<bool> = (0..n).map(|b| code >> b & 1 == 1).collect();
            let x = Decision::Binary(bits.clone());
            for obj in 0..3 {
                let expected = 1.0 - rmnk_reference(&inst, &bits, obj);
                assert_eq!(inst.evaluate(&x, obj).unwrap(), expected);
            }
        }
    }
}

#[test]
fn rmnk_generation_is_reproducible() {
    let a = ProblemSpec::Rmnk { m: 4, n: None, k: 2, rho: 0.3, seed: 11 }.instantiate().unwrap();
    let b = ProblemSpec::Rmnk { m: 4, n: None, k: 2, rho: 0.3, seed: 11 }.instantiate().unwrap();
    let c = ProblemSpec::Rmnk { m: 4, n: None, k: 2, rho: 0.3, seed: 12 }.instantiate().unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.encoding(), Encoding::Binary { n: 10 });
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

#[test]
fn rmnk_contribution_correlation() {
    // Phi of bivariate normals with correlation rho has Pearson
    // correlation (6 / pi) asin(rho / 2).
    for rho in [-0.3, 0.0, 0.5, 0.9] {
        let inst = RmnkInstance::generate(4, 40, 6, rho, 3).unwrap();
        let flat = |o: usize| inst.tables[o].iter().flatten().copied().collect::<Vec<f64>>();
        let expected = 6.0 / std::f64::consts::PI * (rho / 2.0_f64).asin();
        for (a, b) in [(0, 1), (1, 3), (0, 2)] {
            let r = pearson(&flat(a), &flat(b));
            assert!((r - expected).abs() < 0.03, "rho {rho}: {r} vs {expected}");
        }
    }
}

#[test]
fn rmnk_rejects_bad_parameters() {
    assert!(matches!(RmnkInstance::generate(4, 10, 10, 0.0, 0), Err(Error::Parameter(_))));
    assert!(matches!(RmnkInstance::generate(4, 10, 1, -0.5, 0), Err(Error::Parameter(_))));
    assert!(ProblemSpec::Rmnk { m: 5, n: None, k: 1, rho: 0.0, seed: 0 }.instantiate().is_err());
}

#[test]
fn random_points_stay_in_range() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let inst = RmnkInstance::generate(10, 20, 1, 0.0, 9).unwrap();
    for _ in 0..200 {
        let x = Decision::Binary((0..20).map(|_| rng.random()).collect());
        assert!(eval_all(&inst, &x).iter().all(|v| (0.0..=1.0).contains(v)));
    }
}

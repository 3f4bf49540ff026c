use hdo_core::moea::variation::{bit_flip_mutation, variation, VariationConfig};
use hdo_core::problems::Encoding;
use hdo_core::Decision;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn bit_flip_rate_is_one_over_n_on_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 20;
    let trials = 20_000;
    let mut flips = 0usize;
    for _ in 0..trials {
        let mut bits = vec![false; n];
        bit_flip_mutation(&mut bits, 1.0 / n as f64, &mut rng);
        flips += bits.iter().filter(|b| **b).count();
    }
    let mean = flips as f64 / trials as f64;
    // standard error is about 0.007
    assert!((mean - 1.0).abs() < 0.03, "mean flips {mean}");
}

proptest! {
    #[test]
    fn real_children_stay_in_bounds(seed in any::<u64>(), a in proptest::collection::vec(0.25f64..=0.75, 8), b in proptest::collection::vec(0.25f64..=0.75, 8)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let enc = Encoding::Real { n: 8, lower: 0.25, upper: 0.75 };
        let (c1, c2) = variation(&Decision::Real(a), &Decision::Real(b), &enc, &VariationConfig::default(), &mut rng).unwrap();
        for c in [c1, c2] {
            let Decision::Real(v) = c else { panic!("encoding changed") };
            prop_assert!(v.iter().all(|x| (0.25..=0.75).contains(x)));
        }
    }

    #[test]
    fn binary_children_keep_length(seed in any::<u64>(), a in proptest::collection::vec(any::<bool>(), 12), b in proptest::collection::vec(any::<bool>(), 12)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c1, c2) = variation(&Decision::Binary(a), &Decision::Binary(b), &Encoding::Binary { n: 12 }, &VariationConfig::default(), &mut rng).unwrap();
        for c in [c1, c2] {
            let Decision::Binary(v) = c else { panic!("encoding changed") };
            prop_assert_eq!(v.len(), 12);
        }
    }
}

#[test]
fn mismatched_encoding_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let r = variation(
        &Decision::Binary(vec![true; 4]),
        &Decision::Binary(vec![false; 4]),
        &Encoding::Real { n: 4, lower: 0.0, upper: 1.0 },
        &VariationConfig::default(),
        &mut rng,
    );
    assert!(r.is_err());
}

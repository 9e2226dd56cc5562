use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use refrig_imc_core::metrics::weighted_j;
use refrig_imc_core::{aggregate_j, iae, iavu, itae, IndexSet, JWeights};

fn positive8() -> impl Strategy<Value = [f64; 8]> {
    proptest::array::uniform8(1e-3..1e3f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn self_ratio_is_exactly_one(raw in positive8(), w in proptest::array::uniform8(0.0..10.0f64)) {
        prop_assume!(w.iter().sum::<f64>() > 0.0);
        let s = IndexSet::from_array(raw);
        let r = aggregate_j(&s, &s, &JWeights::new(w).unwrap()).unwrap().relative.unwrap();
        prop_assert!(r.ratios.iter().all(|x| *x == 1.0));
        prop_assert_eq!(r.j, 1.0);
    }

    #[test]
    fn j_is_monotone_in_each_ratio(
        ratios in positive8(),
        w in proptest::array::uniform8(0.01..10.0f64),
        which in 0usize..8,
        bump in 1e-3..10.0f64,
    ) {
        let w = JWeights::new(w).unwrap();
        let mut up = ratios;
        up[which] += bump;
        prop_assert!(weighted_j(&up, &w) > weighted_j(&ratios, &w));
    }

    #[test]
    fn weight_scale_does_not_matter(ratios in positive8(), w in proptest::array::uniform8(0.01..10.0f64), c in 1e-3..1e3f64) {
        let a = weighted_j(&ratios, &JWeights::new(w).unwrap());
        let b = weighted_j(&ratios, &JWeights::new(w.map(|x| x * c)).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn indices_scale_with_amplitude(
        e in proptest::collection::vec(-5.0..5.0f64, 20..100),
        alpha in -10.0..10.0f64,
    ) {
        let scaled: Vec<f64> = e.iter().map(|v| alpha * v).collect();
        let tol = |x: f64| 1e-9 * (1.0 + x.abs());
        let (a, b) = (iae(&e, 0.5), iae(&scaled, 0.5));
        prop_assert!((b - alpha.abs() * a).abs() <= tol(b));
        let (a, b) = (iavu(&e), iavu(&scaled));
        prop_assert!((b - alpha.abs() * a).abs() <= tol(b));
        let win = (1.0, 0.5 * (e.len() - 1) as f64 - 2.0);
        let (a, b) = (itae(&e, 0.5, win).unwrap(), itae(&scaled, 0.5, win).unwrap());
        prop_assert!((b - alpha.abs() * a).abs() <= tol(b));
        prop_assert!(a >= 0.0);
    }
}

#[test]
fn j_identity_for_random_weight_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let s = IndexSet::from_array(std::array::from_fn(|_| rng.gen_range(0.1..100.0)));
    for _ in 0..10 {
        let w = JWeights::new(std::array::from_fn(|_| rng.gen_range(0.0..5.0))).unwrap();
        let r = aggregate_j(&s, &s, &w).unwrap().relative.unwrap();
        assert_eq!(r.j, 1.0);
    }
}

#[test]
fn ramp_itae_matches_analytic_integral() {
    // e(t) = t on [0, 4]: window (1, 2) integrates (t - 1) t over [1, 3]
    let ts = 1e-3;
    let e: Vec<f64> = (0..=4000).map(|n| n as f64 * ts).collect();
    let want = (27.0 / 3.0 - 9.0 / 2.0) - (1.0 / 3.0 - 1.0 / 2.0);
    assert!((itae(&e, ts, (1.0, 2.0)).unwrap() - want).abs() < 1e-5);
}

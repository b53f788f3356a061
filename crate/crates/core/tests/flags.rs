use boundcoh::flags::{flat_boundary, is_generic_triple, is_opposite, random_sl3, triple_ratio, Flag3, DEFAULT_TOL};
use boundcoh::rng::substream;
use boundcoh::sampling::{sample_generic, FlagSampler};
use proptest::prelude::*;

fn triple(seed: u64) -> [Flag3; 3] {
    let mut rng = substream(seed, 0);
    [Flag3::random(&mut rng), Flag3::random(&mut rng), Flag3::random(&mut rng)]
}

#[test]
fn random_triples_are_generic() {
    let batch = sample_generic(&FlagSampler { tol: DEFAULT_TOL }, 3, 100_000, 41).unwrap();
    assert!(batch.acceptance_rate() >= 0.999, "{}", batch.acceptance_rate());
}

#[test]
fn triple_ratio_is_sl3_invariant() {
    let batch = sample_generic(&FlagSampler { tol: DEFAULT_TOL }, 3, 5_000, 42).unwrap();
    for (i, t) in batch.tuples.iter().enumerate() {
        let g = random_sl3(&mut substream(43, i as u64));
        let gt: Vec<Flag3> = t.iter().map(|f| f.transform(&g).unwrap()).collect();
        let a = triple_ratio(&t[0], &t[1], &t[2]).unwrap();
        let b = triple_ratio(&gt[0], &gt[1], &gt[2]).unwrap();
        assert!((a - b).abs() <= 1e-9 * a.abs(), "{a} {b}");
    }
}

#[test]
fn triple_ratio_escapes_every_compact_set() {
    let batch = sample_generic(&FlagSampler { tol: DEFAULT_TOL }, 3, 100_000, 44).unwrap();
    let t: Vec<f64> = batch
        .tuples
        .iter()
        .map(|x| triple_ratio(&x[0], &x[1], &x[2]).unwrap().abs())
        .collect();
    assert!(t.iter().any(|v| *v > 1e3));
    assert!(t.iter().any(|v| *v < 1e-3));
}

#[test]
fn flat_boundary_is_symmetric_in_the_pair() {
    for s in 0..500 {
        let [a, b, _] = triple(s);
        let ab = flat_boundary(&a, &b).unwrap();
        let ba = flat_boundary(&b, &a).unwrap();
        assert!(ab.flags.iter().all(|f| ba.contains(f, 1e-9)));
        assert!(ba.flags.iter().all(|f| ab.contains(f, 1e-9)));
        assert!(ab.flags[0].approx_eq(&a, 1e-12) && ab.flags[5].approx_eq(&b, 1e-12));
    }
}

#[test]
fn flat_boundary_flags_are_pairwise_related_by_incidence() {
    let [a, b, _] = triple(7);
    let flat = flat_boundary(&a, &b).unwrap();
    // opposite pairs in the flat are exactly the pairs (w, w·w₀)
    let opposite = flat
        .flags
        .iter()
        .enumerate()
        .flat_map(|(i, f)| flat.flags.iter().skip(i + 1).map(move |g| is_opposite(f, g, 1e-9)))
        .filter(|x| *x)
        .count();
    assert_eq!(opposite, 3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn opposition_is_symmetric(seed in any::<u64>()) {
        let [a, b, _] = triple(seed);
        prop_assert_eq!(is_opposite(&a, &b, DEFAULT_TOL), is_opposite(&b, &a, DEFAULT_TOL));
    }

    #[test]
    fn genericity_is_permutation_invariant(seed in any::<u64>()) {
        let [a, b, c] = triple(seed);
        let g = is_generic_triple(&a, &b, &c, DEFAULT_TOL);
        for (x, y, z) in [(&a, &c, &b), (&b, &a, &c), (&b, &c, &a), (&c, &a, &b), (&c, &b, &a)] {
            prop_assert_eq!(is_generic_triple(x, y, z, DEFAULT_TOL), g);
        }
    }

    #[test]
    fn triple_ratio_identities(seed in any::<u64>()) {
        let [a, b, c] = triple(seed);
        prop_assume!(is_generic_triple(&a, &b, &c, DEFAULT_TOL));
        let t = triple_ratio(&a, &b, &c).unwrap();
        let swapped = triple_ratio(&a, &c, &b).unwrap();
        let cycled = triple_ratio(&b, &c, &a).unwrap();
        prop_assert!((t * swapped - 1.0).abs() <= 1e-12);
        prop_assert!((cycled - t).abs() <= 1e-12 * t.abs().max(1.0));
    }
}

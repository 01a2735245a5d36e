use circlab::combinatorics::enumerate_a2p;
use circlab::entries::derive_seed;
use circlab::spectra::{eigenvalues_dense, eigenvalues_fast, esd_moment};
use circlab::trace::{direct_trace, rc_formula, sc_power_formula, verify_trace};
use circlab::{sample_entries, CirculantMatrix, EntryDistribution, MatrixKind};
use proptest::prelude::*;

fn kind_strategy() -> impl Strategy<Value = MatrixKind> {
    prop_oneof![Just(MatrixKind::Reverse), Just(MatrixKind::Symmetric)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formula_trace_is_exact(kind in kind_strategy(), n in 2usize..=10, h in 1usize..=5, seed in any::<u64>()) {
        let c = verify_trace(kind, n, h, seed).unwrap();
        prop_assert!(c.exact_equal);
        prop_assert_eq!(c.abs_diff, 0.0);
    }

    #[test]
    fn float_formulas_track_direct_products(n in 2usize..=9, h in 1usize..=5, seed in any::<u64>()) {
        let g = EntryDistribution::StandardGaussian;
        let xs: Vec<Vec<f64>> = (0..h)
            .map(|r| sample_entries(&g, n, derive_seed(seed, &[r as u64])).unwrap().values().to_vec())
            .collect();
        let f: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        let rc = rc_formula(n, &f).unwrap().value(n);
        let rc_direct = direct_trace(MatrixKind::Reverse, n, &f).unwrap().value(n);
        prop_assert!((rc - rc_direct).abs() <= 1e-9 * rc_direct.abs().max(1.0));
        let same: Vec<&[f64]> = vec![&xs[0]; h];
        let sc = sc_power_formula(n, &xs[0], h).unwrap().value(n);
        let sc_direct = direct_trace(MatrixKind::Symmetric, n, &same).unwrap().value(n);
        prop_assert!((sc - sc_direct).abs() <= 1e-9 * sc_direct.abs().max(1.0));
    }

    #[test]
    fn esd_moments_are_normalized_traces(kind in kind_strategy(), n in 1usize..=24, h in 1u32..=6, seed in any::<u64>()) {
        let x = sample_entries(&EntryDistribution::UniformSqrt3, n, seed).unwrap();
        let s = eigenvalues_fast(kind, &x);
        let factors: Vec<&[f64]> = vec![x.values(); h as usize];
        let tr = direct_trace(kind, n, &factors).unwrap().value(n) / n as f64;
        prop_assert!((esd_moment(&s, h) - tr).abs() <= 1e-9 * tr.abs().max(1.0));
        prop_assert!(esd_moment(&s, 2) >= 0.0);
    }

    #[test]
    fn fast_and_dense_spectra_agree(kind in kind_strategy(), n in 1usize..=48, seed in any::<u64>()) {
        let x = sample_entries(&EntryDistribution::Rademacher, n, seed).unwrap();
        let fast = eigenvalues_fast(kind, &x);
        let dense = eigenvalues_dense(&CirculantMatrix::new(kind, x).materialize().unwrap()).unwrap();
        prop_assert!(fast.max_abs_deviation(&dense) <= 1e-8);
    }

    #[test]
    fn sampling_is_deterministic(n in 1usize..=200, seed in any::<u64>()) {
        for dist in [EntryDistribution::StandardGaussian, EntryDistribution::Rademacher, "integer".parse().unwrap()] {
            let a = sample_entries(&dist, n, seed).unwrap();
            let b = sample_entries(&dist, n, seed).unwrap();
            prop_assert_eq!(a.values(), b.values());
        }
    }
}

#[test]
fn a2p_has_one_free_congruence() {
    for n in 1..=6usize {
        for p in 1..=2usize {
            let count = enumerate_a2p(n, p).unwrap().count();
            assert_eq!(count, n.pow(2 * p as u32 - 1), "n={n} p={p}");
        }
    }
}

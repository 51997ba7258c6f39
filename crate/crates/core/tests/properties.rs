use proptest::prelude::*;
use tauberlab::sieve::{mangoldt_block, BlockCache, MangoldtSieve};
use tauberlab::tauber::*;
use tauberlab::zeta::{zeta, zeta_bounds_check};

fn bytes(b: &tauberlab::MangoldtBlock) -> Vec<u8> {
    let mut out = Vec::new();
    b.write_to(&mut out).unwrap();
    out
}

fn step_strategy() -> impl Strategy<Value = SampledFunction> {
    (2usize..40)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(0.01f64..3.0, n),
                prop::collection::vec(-5.0f64..5.0, n),
            )
        })
        .prop_map(|(gaps, values)| {
            let mut x = 0.0;
            let grid: Vec<f64> = gaps
                .iter()
                .map(|g| {
                    let here = x;
                    x += g;
                    here
                })
                .collect();
            SampledFunction::step(grid, values, TailModel::ConstantLastValue).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn block_composition(a in 2u64..200_000, l1 in 1u64..5_000, l2 in 1u64..5_000) {
        let b = a + l1;
        let c = b + l2;
        let joined = mangoldt_block(a, b).unwrap().concat(&mangoldt_block(b, c).unwrap()).unwrap();
        prop_assert_eq!(bytes(&joined), bytes(&mangoldt_block(a, c).unwrap()));
    }

    #[test]
    fn blocks_are_deterministic(a in 2u64..1_000_000, l in 1u64..10_000) {
        let s = MangoldtSieve::new(a + l).unwrap().with_segment_size(1 << 14);
        prop_assert_eq!(bytes(&mangoldt_block(a, a + l).unwrap()), bytes(&mangoldt_block(a, a + l).unwrap()));
        if l <= 1 << 14 {
            prop_assert_eq!(bytes(&s.block(a, a + l).unwrap()), bytes(&mangoldt_block(a, a + l).unwrap()));
        }
    }

    #[test]
    fn zeta_bounds_hold(s in prop_oneof![1.000_000_01f64..1.001, 1.001f64..100.0]) {
        prop_assert!(zeta_bounds_check(s));
    }

    #[test]
    fn kernel_is_unitary(t in 1e-4f64..100.0) {
        let one = SampledFunction::closed(ClosedForm::Constant(1.0));
        let f = abel_laplace_mean(&one, t).unwrap();
        prop_assert!((f.value - 1.0).abs() <= 1e-12);
        let step_one = SampledFunction::step(vec![0.0], vec![1.0], TailModel::ConstantLastValue).unwrap();
        prop_assert!((abel_laplace_mean(&step_one, t).unwrap().value - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn truncation_identity(u in step_strategy(), t in 0.02f64..5.0) {
        let direct = truncated_mean(&u, t).unwrap();
        let kernel = kernel_path(&u, t).unwrap();
        prop_assert!((direct.value - kernel.value).abs() <= TRUNCATION_TOL);
    }

    #[test]
    fn shift_covariance(u in step_strategy(), c in -3.0f64..3.0, t in 0.05f64..4.0, x in 0.1f64..20.0) {
        let shifted = u.offset(c);
        let f = abel_laplace_mean(&u, t).unwrap().value;
        let fc = abel_laplace_mean(&shifted, t).unwrap().value;
        prop_assert!((fc - (f + c)).abs() <= 1e-10 * (1.0 + f.abs()));
        let s = cesaro_mean(&u, x).unwrap().value;
        let sc = cesaro_mean(&shifted, x).unwrap().value;
        prop_assert!((sc - (s + c)).abs() <= 1e-10 * (1.0 + s.abs()));
    }

    #[test]
    fn shift_covariance_closed_forms(c in -3.0f64..3.0, t in 0.01f64..4.0) {
        let u = registry("one_minus_exp", None).unwrap();
        let f = abel_laplace_mean(&u.offset(c), t).unwrap().value;
        prop_assert!((f - (1.0 / (1.0 + t) + c)).abs() <= 1e-9);
    }
}

#[test]
fn bounds_on_fixed_points() {
    for s in [1.001, 1.5, 2.0, 10.0, 100.0] {
        assert!(zeta_bounds_check(s));
        let z = zeta(s, 1e-12 * (1.0 / (s - 1.0)).max(1.0)).unwrap();
        assert!(z.value >= 1.0 / (s - 1.0) - z.err);
    }
}

#[test]
fn cesaro_follows_abel_for_positive_decaying_u() {
    // u = e^{-x}: f(t) = t/(1+t) → 0, and σ(1/t) = t(1 − e^{−1/t}) → 0.
    let u = SampledFunction::closed(ClosedForm::custom("exp(-x)", |x| (-x).exp()));
    let ts = [1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001];
    let mut last = (f64::INFINITY, f64::INFINITY);
    for t in ts {
        let f = abel_laplace_mean(&u, t).unwrap().value;
        let s = cesaro_mean(&u, 1.0 / t).unwrap().value;
        assert!((f - t / (1.0 + t)).abs() < 1e-10);
        assert!(f < last.0 && s < last.1, "t = {t}");
        last = (f, s);
    }
    assert!(last.1 < 2e-3);
}

#[test]
fn cache_round_trip_through_env() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var("TAUBER_CACHE_DIR", dir.path());
    let cache = BlockCache::from_env().unwrap();
    let sieve = MangoldtSieve::new(10_000).unwrap();
    let fresh = cache.load_or_compute(&sieve, 100, 5000).unwrap();
    let path = dir.path().join("mangoldt_100_5000.blk");
    assert!(path.exists());
    let again = cache.load_or_compute(&sieve, 100, 5000).unwrap();
    assert_eq!(bytes(&fresh), bytes(&again));
    assert_eq!(std::fs::read(&path).unwrap(), bytes(&fresh));
    let raw = std::fs::read(&path).unwrap();
    assert_eq!(u64::from_le_bytes(raw[0..8].try_into().unwrap()), 100);
    assert_eq!(u64::from_le_bytes(raw[8..16].try_into().unwrap()), 5000);
    assert_eq!(raw.len(), 16 + 9 * 4900);
    std::env::remove_var("TAUBER_CACHE_DIR");
}

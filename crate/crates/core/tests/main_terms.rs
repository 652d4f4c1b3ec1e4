#[path = "support/exact.rs"]
mod exact;

use mollifier_core::moments::{lambda_exact, moments_numeric, proportion, s1_main};
use mollifier_core::optimizer::{build_forms, maximize_proportion};
use mollifier_core::poly::RationalPoly;
use mollifier_core::rational::{ratio, to_f64};
use mollifier_core::spec::MollifierSpec;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec((-12i64..=12, 1i64..=6).prop_map(|(n, d)| ratio(n, d)), 0..=max_len)
}

fn spec_strategy() -> impl Strategy<Value = MollifierSpec> {
    (1i64..=9, 1i64..=9, coeffs(5), coeffs(5)).prop_map(|(a, b, p, q)| MollifierSpec {
        theta1: ratio(a.max(b), 10),
        theta2: ratio(a.min(b), 10),
        p: RationalPoly::from_linear_up(p),
        q: RationalPoly::from_linear_up(q),
        q_for_lengths: None,
    })
}

#[test]
fn paper_preset_against_independent_integration() {
    let spec = MollifierSpec::paper();
    let (s1, lambda) = exact::s1_lambda(&spec.theta1, &spec.theta2, spec.p.coeffs(), spec.q.coeffs());
    assert_eq!(s1, ratio(89, 80));
    assert_eq!(lambda, ratio(69665, 19200));
    assert_eq!(proportion(&spec).unwrap(), ratio(23763, 69665));
}

/// Fixed seed so the 50 specs are the same on every run.
#[test]
fn lambda_matches_adaptive_quadrature() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut specs = vec![MollifierSpec::paper()];
    for _ in 0..50 {
        let c = |rng: &mut ChaCha8Rng| {
            let d = rng.random_range(0..=5);
            (0..d).map(|_| ratio(rng.random_range(-12..=12), rng.random_range(1..=6))).collect::<Vec<_>>()
        };
        let (a, b) = (rng.random_range(1..=9i64), rng.random_range(1..=9i64));
        let p = RationalPoly::from_linear_up(c(&mut rng));
        let q = RationalPoly::from_linear_up(c(&mut rng));
        specs.push(MollifierSpec { theta1: ratio(a.max(b), 10), theta2: ratio(a.min(b), 10), p, q, q_for_lengths: None });
    }
    for spec in &specs {
        let (s1, terms) = moments_numeric(spec).unwrap();
        let numeric: f64 = terms.iter().sum();
        let exact = to_f64(&lambda_exact(spec));
        assert!((exact - numeric).abs() <= 1e-10 * exact.abs().max(1.0), "{spec:?}: {exact} vs {numeric}");
        let s1_exact = to_f64(&s1_main(spec));
        assert!((s1_exact - s1).abs() <= 1e-10 * s1_exact.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_terms_match_independent_integration(spec in spec_strategy()) {
        let (s1, lambda) = exact::s1_lambda(&spec.theta1, &spec.theta2, spec.p.coeffs(), spec.q.coeffs());
        prop_assert_eq!(s1, s1_main(&spec));
        prop_assert_eq!(lambda, lambda_exact(&spec));
    }

    /// No polynomial pair of the same degrees beats the optimizer.
    #[test]
    fn optimum_dominates(p in coeffs(2), q in coeffs(1)) {
        prop_assume!(p.iter().any(|c| *c != ratio(0, 1)) || q.iter().any(|c| *c != ratio(0, 1)));
        let spec = MollifierSpec::paper();
        let model = build_forms(2, 1, &spec.theta1, &spec.theta2).unwrap();
        let best = maximize_proportion(&model).unwrap().proportion;
        let trial = MollifierSpec { p: RationalPoly::from_linear_up(p), q: RationalPoly::from_linear_up(q), ..spec };
        if let Ok(value) = proportion(&trial) {
            prop_assert!(value <= best);
        }
    }
}

#[test]
fn optimum_at_paper_degrees_reaches_the_headline() {
    let spec = MollifierSpec::paper();
    let model = build_forms(2, 1, &spec.theta1, &spec.theta2).unwrap();
    let best = maximize_proportion(&model).unwrap();
    assert!(best.proportion >= ratio(23763, 69665));
    assert_eq!(proportion(&best.spec()).unwrap(), best.proportion);
}

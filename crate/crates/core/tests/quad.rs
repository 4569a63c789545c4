use proptest::prelude::*;
use qel::poly::critical_poly;
use qel::quad::*;
use qel::QuadParam;

fn param() -> impl Strategy<Value = QuadParam> {
    (0.0..=2.0f64).prop_map(|t| QuadParam::new(t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn coefficient_form_matches_value_recursion(t in param(), n in 0usize..=10) {
        let p = critical_poly(n).unwrap();
        let by_value = critical_poly_eval(n, t);
        let exact = p.eval_exact(t.get());
        prop_assert!((exact - by_value).abs() <= 1e-9 * by_value.abs().max(1.0));
    }

    #[test]
    fn fixed_points_are_fixed(t in param()) {
        let (a, b) = fixed_points(t);
        prop_assert!((eval_map(t, a) - a).abs() <= 1e-12);
        prop_assert!((eval_map(t, b) - b).abs() <= 1e-12);
        prop_assert!(a <= -1.0 && b >= 0.0);
    }

    #[test]
    fn interval_is_invariant(t in param(), s in 0.0..=1.0f64) {
        let iv = invariant_interval(t);
        let x = iv.lo + s * iv.width();
        let y = eval_map(t, x);
        prop_assert!(y >= iv.lo - 1e-12 && y <= iv.hi + 1e-12);
    }

    #[test]
    fn conjugacy_round_trip(t in param(), z in 0.0..=1.0f64) {
        let c = logistic_conjugacy(t);
        prop_assert!((c.to_logistic(c.from_logistic(z)) - z).abs() <= 1e-14);
        prop_assert!((c.quad_param() - t.get()).abs() <= 1e-12);
        let lhs = c.to_logistic(eval_map(t, c.from_logistic(z)));
        prop_assert!((lhs - c.logistic(z)).abs() <= 1e-12);
    }

    #[test]
    fn iterate_agrees_with_iterate_n(t in param(), x in -1.0..=1.0f64, n in 0usize..30) {
        let orbit = iterate(t, x, n);
        prop_assert_eq!(orbit.len(), n + 1);
        prop_assert_eq!(*orbit.last().unwrap(), iterate_n(t, x, n));
    }
}

#[test]
fn critical_values_at_the_ends() {
    for n in 2..=20 {
        assert_eq!(critical_poly_eval(n, QuadParam::new(2.0).unwrap()), -2.0);
        assert_eq!(critical_poly_eval(n, QuadParam::new(0.0).unwrap()), 0.0);
    }
    assert_eq!(critical_poly_eval(1, QuadParam::new(2.0).unwrap()), 2.0);
}

#[test]
fn coefficients_at_order_fourteen() {
    let p = critical_poly(14).unwrap();
    assert_eq!(p.degree(), 1 << 13);
    // Leading coefficient of P_n is -1 for n >= 2, and P_n(1) alternates 1, 0.
    assert_eq!(p.coeff(1 << 13), (-1).into());
    assert_eq!(p.eval_exact(1.0), 0.0);
    assert_eq!(p.eval_exact(2.0), -2.0);
}

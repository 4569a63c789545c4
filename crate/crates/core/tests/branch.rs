use proptest::prelude::*;
use qel::branch::*;
use qel::quad::iterate_n;
use qel::QuadParam;

fn signature(max_rank: usize) -> impl Strategy<Value = Signature> {
    prop::collection::vec(any::<bool>(), 1..=max_rank).prop_map(|bits| {
        Signature::new(bits.into_iter().map(|b| if b { Sign::Minus } else { Sign::Plus }).collect()).unwrap()
    })
}

fn param() -> impl Strategy<Value = QuadParam> {
    (0.0..=2.0f64).prop_map(|t| QuadParam::new(t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn flipping_the_first_sign_negates(sigma in signature(12), t in param()) {
        let a = eval_branch(&sigma, t);
        let b = eval_branch(&sigma.mirrored(), t);
        prop_assert_eq!(a.defined, b.defined);
        if let (Some(x), Some(y)) = (a.value, b.value) {
            prop_assert_eq!(x, -y);
        }
    }

    #[test]
    fn regular_values_are_roots(sigma in signature(12), t in param()) {
        let e = eval_branch(&sigma, t);
        if e.regular {
            let x = e.value.unwrap();
            let n = sigma.rank();
            prop_assert!(iterate_n(t, x, n).abs() <= 1e-9 * 2f64.powi(n as i32));
        }
    }

    #[test]
    fn one_step_drops_the_first_sign(sigma in signature(12), t in param()) {
        prop_assume!(sigma.rank() >= 2);
        let tail = sigma.suffix(1).unwrap();
        if let (Some(x), Some(y)) = (eval_branch(&sigma, t).value, eval_branch(&tail, t).value) {
            prop_assert!((t.get() - x * x + y).abs() <= 1e-10);
        }
    }

    #[test]
    fn domains_shrink_with_rank(sigma in signature(12), t in param(), minus in any::<bool>()) {
        let s = if minus { Sign::Minus } else { Sign::Plus };
        if eval_branch(&sigma.prepend(s), t).defined {
            prop_assert!(eval_branch(&sigma, t).defined);
        }
    }

    #[test]
    fn values_stay_inside_the_envelope(sigma in signature(12), t in (1e-6..=2.0f64)) {
        let t = QuadParam::new(t).unwrap();
        let (lo, hi) = envelope(t);
        if let Some(x) = eval_branch(&sigma, t).value {
            prop_assert!(lo < x && x < hi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn order_agrees_with_values(sigma in signature(8), rho in signature(8), u in 0.0..1.0f64) {
        prop_assume!(sigma != rho);
        let lo = branching_point(&sigma).unwrap().t_sigma.max(branching_point(&rho).unwrap().t_sigma);
        let t = QuadParam::new(lo + (2.0 - lo) * u).unwrap();
        let (a, b) = (eval_branch(&sigma, t), eval_branch(&rho, t));
        prop_assume!(a.regular && b.regular);
        let (x, y) = (a.value.unwrap(), b.value.unwrap());
        prop_assert_ne!(x, y);
        let expected = if x > y { BranchOrder::Above } else { BranchOrder::Below };
        prop_assert_eq!(compare_signatures(&sigma, &rho).unwrap(), expected);
    }
}

#[test]
fn radical_matches_trigonometric_form_at_two() {
    for rank in 1..=10 {
        for sigma in Signature::enumerate(rank) {
            let (r, g) = branch_at_two(&sigma);
            assert!((r - g).abs() <= 1e-12, "{sigma}");
        }
    }
}

#[test]
fn regular_sets_are_right_anchored_intervals() {
    let grid: Vec<f64> = (0..=2000).map(|i| i as f64 * 1e-3).collect();
    for rank in 1..=6 {
        for sigma in Signature::enumerate(rank) {
            let regular: Vec<bool> = grid.iter().map(|&t| is_regular(sigma.signs(), t)).collect();
            let first = regular.iter().position(|&r| r).unwrap();
            assert!(regular[first..].iter().all(|&r| r), "{sigma}");
            let bp = branching_point(&sigma).unwrap().t_sigma;
            assert!((grid[first] - bp).abs() <= 2e-3, "{sigma}: {} vs {bp}", grid[first]);
        }
    }
}

#[test]
fn positive_branches_cross_the_bisector_once() {
    for rank in 1..=8 {
        for sigma in Signature::enumerate(rank).filter(|s| s.signs()[0] == Sign::Plus) {
            let mut changes = 0;
            let mut prev: Option<f64> = None;
            for i in 0..=20_000 {
                let t = i as f64 * 1e-4;
                if !is_regular(sigma.signs(), t) {
                    prev = None;
                    continue;
                }
                let g = branch_value(sigma.signs(), t).unwrap() - t;
                if let Some(p) = prev {
                    if p.signum() != g.signum() {
                        changes += 1;
                    }
                }
                prev = Some(g);
            }
            assert!(changes <= 1, "{sigma}: {changes} crossings");
        }
    }
}

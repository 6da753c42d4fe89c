use fig8::cjones::{colored_jones_fig8, eval_at_xi, eval_at_xi_with, kashaev, KnotParam};
use fig8::precision::{rel_dist, BigComplex, EvalRequest};
use proptest::prelude::*;

/// Each term's product rebuilt from scratch.
fn direct_sum(n: u32, q: &BigComplex) -> BigComplex {
    let prec = q.prec();
    let one = BigComplex::one(prec);
    let mut s = BigComplex::zero(prec);
    for k in 0..n {
        let mut t = q.powi(-((k * n) as i32));
        for l in 1..=k {
            t = t * (&one - &q.powi((n - l) as i32)) * (&one - &q.powi((n + l) as i32));
        }
        s = s + t;
    }
    s
}

/// `Σ_k Π_{l ≤ k} 4 sin²(πl/N)` in double precision.
fn kashaev_f64(n: u32) -> f64 {
    let mut s = 0.0;
    let mut t = 1.0;
    for k in 0..n {
        if k > 0 {
            let x = (std::f64::consts::PI * k as f64 / n as f64).sin();
            t *= 4.0 * x * x;
        }
        s += t;
    }
    s
}

#[test]
fn kashaev_against_product_of_sines() {
    for n in [1, 2, 3, 7, 20, 60] {
        let v = kashaev(n).unwrap();
        let want = kashaev_f64(n);
        assert!((v.re_f64() - want).abs() <= 1e-12 * want, "N = {n}");
    }
}

#[test]
fn kashaev_is_real_up_to_three_hundred() {
    for n in 1..=300 {
        let v = kashaev(n).unwrap();
        assert!(v.im_f64().abs() <= 1e-25 * v.abs_f64(), "N = {n}: {}", v.im_f64());
    }
}

#[test]
fn doubling_precision_is_stable() {
    for (u, n) in [(0.3, 40), (0.8, 120), (0.0, 90)] {
        let p = KnotParam::new(u, n).unwrap();
        let v = eval_at_xi(&p).unwrap();
        let w = colored_jones_fig8(n, &p.q(2 * v.prec())).unwrap();
        assert!(rel_dist(&v, &w) <= 1e-30, "u = {u}, N = {n}");
    }
}

#[test]
fn first_colors_at_xi() {
    let p = KnotParam::new(0.3, 1).unwrap();
    assert!(rel_dist(&eval_at_xi(&p).unwrap(), &BigComplex::one(128)) < 1e-30);
    let req = EvalRequest::new(1e-20, 64, 1024).unwrap();
    let v = eval_at_xi_with(&KnotParam::new(0.5, 12).unwrap(), &req).unwrap();
    assert!(v.is_finite());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn amphicheiral(n in 1u32..=20, r in 0.8f64..1.25, theta in -3.1f64..3.1) {
        let q = BigComplex::new(256, r * theta.cos(), r * theta.sin());
        let a = colored_jones_fig8(n, &q).unwrap();
        let b = colored_jones_fig8(n, &q.recip()).unwrap();
        prop_assert!(rel_dist(&a, &b) < 1e-40, "{}", rel_dist(&a, &b));
    }

    #[test]
    fn running_products_match_direct_terms(n in 1u32..=15, u in 0.0f64..0.95) {
        let q = KnotParam::new(u, n).unwrap().q(256);
        let a = colored_jones_fig8(n, &q).unwrap();
        let b = direct_sum(n, &q);
        prop_assert!(rel_dist(&a, &b) < 1e-50);
    }

    #[test]
    fn real_for_real_q(n in 1u32..=20, x in 0.3f64..3.0) {
        let v = colored_jones_fig8(n, &BigComplex::from_real(128, x)).unwrap();
        prop_assert!(v.im_f64() == 0.0);
    }
}

use std::f64::consts::PI;

use coset_forge::algebra::{build_catalog, term_exchange, Rotation};
use coset_forge::contraction::exchange_factor;
use coset_forge::modes::{AlgebraParams, ExpTrigTerm, ModeFunction};
use coset_forge::rational::{q, GaussQ, Q};
use coset_forge::specfun::{gamma_ratio, gamma_ratio_asymptotic, log_gamma};
use num_complex::Complex64;
use proptest::prelude::*;

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1.0)
}

/// Equality up to a multiple of 2πi.
fn close_mod_2pi_i(a: Complex64, b: Complex64, tol: f64) -> bool {
    let d = a - b;
    let turns = d.im / (2.0 * PI);
    d.re.abs() <= tol * b.norm().max(1.0) && (turns - turns.round()).abs() * 2.0 * PI <= tol * b.norm().max(1.0)
}

fn off_axis() -> impl Strategy<Value = Complex64> {
    (-30.0..30.0f64, -30.0..30.0f64)
        .prop_filter("away from the poles", |(re, im)| im.abs() > 0.05 || *re > 0.05)
        .prop_map(|(re, im)| Complex64::new(re, im))
}

fn level() -> impl Strategy<Value = Q> {
    prop_oneof![Just(q(1, 1)), Just(q(2, 1)), Just(q(3, 1)), Just(q(5, 2)), Just(q(7, 3)), Just(q(4, 1))]
}

fn small_q() -> impl Strategy<Value = Q> {
    (-8i64..=8, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn positive_q() -> impl Strategy<Value = Q> {
    (1i64..=6, 1i64..=3).prop_map(|(n, d)| q(n, d))
}

fn exp_trig_term() -> impl Strategy<Value = ExpTrigTerm> {
    (
        -3i64..=3,
        small_q(),
        proptest::collection::vec((positive_q(), -2i32..=2), 0..3),
    )
        .prop_map(|(c, shift, sinh)| ExpTrigTerm::new(GaussQ::int(c), 1, shift, sinh, Q::from_integer(0.into())).unwrap())
}

fn mode_function_sized(terms: usize) -> impl Strategy<Value = ModeFunction> {
    (
        proptest::collection::vec(exp_trig_term(), 0..=terms),
        proptest::collection::vec(exp_trig_term(), 0..=terms),
    )
        .prop_map(|(p, n)| ModeFunction::new("u", p, n))
}

fn mode_function() -> impl Strategy<Value = ModeFunction> {
    mode_function_sized(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn log_gamma_recurrence(z in off_axis()) {
        let lhs = log_gamma(z + 1.0).unwrap();
        let rhs = log_gamma(z).unwrap() + z.ln();
        prop_assert!(close_mod_2pi_i(lhs, rhs, 1e-12), "{z}: {lhs} vs {rhs}");
    }

    #[test]
    fn log_gamma_conjugation(z in off_axis()) {
        let a = log_gamma(z.conj()).unwrap();
        let b = log_gamma(z).unwrap().conj();
        prop_assert!(close(a, b, 1e-13), "{z}");
    }

    #[test]
    fn log_gamma_reflection(re in -6.0..6.0f64, im in 0.1..8.0f64) {
        let z = Complex64::new(re, im);
        let lhs = log_gamma(z).unwrap() + log_gamma(1.0 - z).unwrap();
        let rhs = PI.ln() - (PI * z).sin().ln();
        prop_assert!(close_mod_2pi_i(lhs, rhs, 1e-11), "{z}: {lhs} vs {rhs}");
    }

    #[test]
    fn gamma_ratio_asymptotics_within_second_order(
        r in 10.0..400.0f64,
        theta in -2.5..2.5f64,
        a in -1.0..1.0f64,
        b in -1.0..1.0f64,
    ) {
        let x = Complex64::from_polar(r, theta);
        let exact = gamma_ratio(x, a.into(), b.into()).unwrap();
        let approx = gamma_ratio_asymptotic(a.into(), b.into(), x).unwrap();
        // next term of the expansion is bounded by |d| (|a|+|b|+1)^3 / |x|^2
        let bound = (a - b).abs() * (a.abs() + b.abs() + 1.0).powi(3) / (r * r) + 1e-13;
        prop_assert!((exact / approx - 1.0).norm() <= bound, "x = {x}");
    }

    #[test]
    fn canonical_form_is_pointwise_sound(f in mode_function(), t in 0.05..3.0f64, hbar in 0.25..2.0f64) {
        let c = f.canonicalize().unwrap();
        for s in [t, -t] {
            let a = f.eval(s, hbar);
            let b = c.eval(s, hbar);
            prop_assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0), "{f} at t = {s}: {a} vs {b}");
        }
    }

    // sums of three random functions put many distinct sinh factors over one
    // denominator, so term counts are kept small to bound the gcd degree
    #[test]
    fn canonical_form_is_a_congruence(f in mode_function_sized(1), g in mode_function_sized(1), h in mode_function_sized(1)) {
        let fg = f.add(&g).unwrap();
        prop_assert!(fg.equals(&g.add(&f).unwrap()).unwrap());
        prop_assert!(fg.add(&h).unwrap().equals(&f.add(&g.add(&h).unwrap()).unwrap()).unwrap());
        prop_assert!(f.add(&f.negated()).unwrap().canonicalize().unwrap().is_zero());
        prop_assert_eq!(f.canonicalize().unwrap().canonicalize(), f.canonicalize().unwrap());
    }

    #[test]
    fn sinh_doubling_is_recognised(beta in positive_q(), c in -3i64..=3) {
        let zero = Q::from_integer(0.into());
        let two_beta = &beta * q(2, 1);
        let lhs = ModeFunction::new(
            "u",
            vec![ExpTrigTerm::new(GaussQ::int(c), 0, zero.clone(), vec![(two_beta, 1), (beta.clone(), -1)], zero.clone()).unwrap()],
            vec![],
        );
        let rhs = ModeFunction::new(
            "u",
            vec![
                ExpTrigTerm::exponential(GaussQ::int(c), 0, beta.clone()),
                ExpTrigTerm::exponential(GaussQ::int(c), 0, -beta),
            ],
            vec![],
        );
        prop_assert!(lhs.equals(&rhs).unwrap());
    }

    #[test]
    fn exchange_reciprocity(k in level(), i in 0usize..10, j in 0usize..10, re in -4.0..4.0f64, im in -4.0..4.0f64) {
        let cat = build_catalog(&AlgebraParams::new(k, q(1, 1)).unwrap()).unwrap();
        let (a, b) = (&cat.currents[i], &cat.currents[j]);
        let w = Complex64::new(re, im);
        let s_ab = term_exchange(&cat, &a.terms[0], &b.terms[0], Rotation::None).unwrap();
        let s_ba = term_exchange(&cat, &b.terms[0], &a.terms[0], Rotation::None).unwrap();
        prop_assert!(s_ab.mul(&s_ba.reflect()).is_identity(), "{} {}", a.name, b.name);
        if let (Ok(x), Ok(y)) = (s_ab.eval(w, 1.0), s_ba.eval(-w, 1.0)) {
            if x.is_finite() && y.is_finite() && x.norm() < 1e8 && y.norm() < 1e8 {
                prop_assert!((x * y - 1.0).norm() <= 1e-9, "{} {} at {w}", a.name, b.name);
            }
        }
    }

    #[test]
    fn exchange_depends_on_w_over_hbar(k in level(), i in 0usize..10, j in 0usize..10, lam in 0.2..5.0f64, re in 0.3..4.0f64, im in -2.0..2.0f64) {
        let cat = build_catalog(&AlgebraParams::new(k, q(1, 1)).unwrap()).unwrap();
        let (a, b) = (&cat.currents[i], &cat.currents[j]);
        let Some(family) = a.terms[0].exponents.keys().find(|f| b.terms[0].exponents.contains_key(*f)) else {
            return Ok(());
        };
        let s = exchange_factor(
            &a.terms[0].exponents[family],
            &b.terms[0].exponents[family],
            cat.kernel(family).unwrap(),
        )
        .unwrap();
        let w = Complex64::new(re, im);
        let base = s.eval(w, 1.0).unwrap();
        let scaled = s.eval(w * lam, lam).unwrap();
        prop_assert!((base - scaled).norm() <= 1e-10 * base.norm().max(1.0), "{} {}: {base} vs {scaled}", a.name, b.name);
    }
}

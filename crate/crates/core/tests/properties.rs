use num::BigRational;
use proptest::prelude::*;
use xmpdm::models::{pct_master_residual, ModelKind};
use xmpdm::orthopoly::{laguerre, xm_laguerre_exact, xm_ode_residual, Convention};
use xmpdm::poly::Polynomial;
use xmpdm::susy::{shape_invariance_residual, superpotential, GroundStateSuperpotential};

fn case1() -> impl Strategy<Value = ModelKind> {
    (0.3f64..3.0, 1.1f64..4.0, 1usize..=3, -2.0f64..2.0)
        .prop_map(|(b, a, m, vc)| ModelKind::case1(b, a, m, vc).unwrap())
}

fn case2() -> impl Strategy<Value = ModelKind> {
    (0u32..=3, 1.1f64..4.0, 1usize..=3, -2.0f64..2.0).prop_map(|(e, a, m, vc)| ModelKind::case2(e, a, m, vc).unwrap())
}

fn any_model() -> impl Strategy<Value = ModelKind> {
    prop_oneof![case1(), case2()]
}

fn interior_x(model: &ModelKind, t: f64) -> f64 {
    match model {
        ModelKind::Case1(p) => (-2.0 + 4.0 * t) / p.b(),
        ModelKind::Case2(_) => 0.3 + 1.4 * t,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_is_equispaced(model in any_model(), n in 0usize..50) {
        let gap = model.energy(n + 1) - model.energy(n);
        prop_assert!((gap - model.spacing()).abs() <= 1e-12 * model.energy(n + 1).abs().max(1.0));
    }

    #[test]
    fn case2_spectrum_independent_of_eta(alpha in 1.1f64..4.0, m in 1usize..=4, vc in -2.0f64..2.0, n in 0usize..20) {
        let e0 = ModelKind::case2(0, alpha, m, vc).unwrap().energy(n);
        for eta in 1..=3 {
            prop_assert_eq!(ModelKind::case2(eta, alpha, m, vc).unwrap().energy(n), e0);
        }
    }

    #[test]
    fn mass_is_positive(model in any_model(), t in 0.0f64..1.0) {
        let x = interior_x(&model, t);
        prop_assert!(model.mass(x).unwrap() > 0.0);
    }

    #[test]
    fn pct_identity(model in any_model(), n in 0usize..=3, t in 0.0f64..1.0) {
        let x = interior_x(&model, t);
        let r = pct_master_residual(&model, n, x).unwrap();
        let scale = model.v_eff(x).unwrap().abs() + model.energy(n).abs();
        prop_assert!(r.abs() < 1e-9 * scale.max(1.0), "residual {}", r);
    }

    #[test]
    fn shape_invariance_holds(model in any_model(), t in 0.0f64..1.0) {
        let x = interior_x(&model, t);
        let r = shape_invariance_residual(&model, x).unwrap();
        prop_assert!(r.abs() < 1e-9 * model.v_eff(x).unwrap().abs().max(1.0));
    }

    #[test]
    fn denominator_positive(m in 1i64..=4, alpha in 1.01f64..6.0, g in 0.0f64..50.0) {
        prop_assert!(laguerre(m, alpha - 1.0, -g) > 0.0);
    }

    #[test]
    fn exact_membership(m in 1usize..=4, extra in 0usize..=6, num in 3i64..40, den in 1i64..8) {
        prop_assume!(num > den);
        let alpha = BigRational::new(num.into(), den.into());
        let p = xm_laguerre_exact(m + extra, m, &alpha, Convention::Monic).unwrap();
        prop_assert_eq!(p.degree(), Some(m + extra));
        prop_assert!(xm_ode_residual(&p, m + extra, m, &alpha).is_zero());
        let q = p.scale(&BigRational::new(7.into(), 3.into()));
        prop_assert!(xm_ode_residual(&q, m + extra, m, &alpha).is_zero());
        let bumped = &p + &Polynomial::constant(BigRational::from_integer(1.into()));
        prop_assert!(!xm_ode_residual(&bumped, m + extra, m, &alpha).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn superpotential_is_log_derivative(model in any_model(), t in 0.0f64..1.0) {
        let x = interior_x(&model, t);
        let a = superpotential(&model, x).unwrap();
        let b = GroundStateSuperpotential::new(&model).unwrap().eval(x).unwrap();
        prop_assert!((a - b).abs() < 1e-7 * a.abs().max(1.0), "{} vs {}", a, b);
    }
}

//! Property tests of the geometric identities over random canal surfaces.

mod common;

use canalkit_core::{
    fit_linear, gaussian, jacobi, linear_residual, mean, regularity_check, second_gaussian, CanalSurface,
    CurvaturePair, CurveSpec, FitMask, FramedCurve, GridSpec, Interval, ParamGrid, RadiusSpec, Sign, ORACLE_STEP,
};
use proptest::prelude::*;

const WINDOW: (f64, f64) = (-3.0, 3.0);

fn curve_strategy() -> impl Strategy<Value = CurveSpec> {
    prop_oneof![
        (0.2..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| CurveSpec::Helix { a, b }),
        (0.5..4.0f64).prop_map(|radius| CurveSpec::Circle { radius }),
        (prop::array::uniform3(-2.0..2.0f64), prop::array::uniform3(-1.0..1.0f64))
            .prop_filter("direction must be nonzero", |(_, d)| d.iter().map(|x| x * x).sum::<f64>() > 1e-2)
            .prop_map(|(origin, direction)| CurveSpec::Line { origin, direction }),
    ]
}

fn radius_strategy() -> impl Strategy<Value = RadiusSpec> {
    prop_oneof![
        (0.2..3.0f64).prop_map(|value| RadiusSpec::Constant { value }),
        (1.0..3.0f64, 0.0..0.6f64, 0.2..1.5f64, 0.0..6.3f64).prop_map(|(mean, amp, frequency, phase)| {
            // keep |r'| ≤ 0.6 < 1 and r ≥ 0.4
            let amplitude = amp.min(0.6 / frequency).min(mean - 0.4);
            RadiusSpec::Sinusoid { mean, amplitude, frequency, phase }
        }),
    ]
}

fn sign_strategy() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Plus), Just(Sign::Minus)]
}

fn surface_strategy() -> impl Strategy<Value = CanalSurface> {
    (curve_strategy(), radius_strategy(), sign_strategy()).prop_map(|(c, r, sign)| common::build(c, r, sign, WINDOW))
}

fn point_strategy() -> impl Strategy<Value = (f64, f64)> {
    (-2.5..2.5f64, 0.0..std::f64::consts::TAU)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn frame_is_orthonormal(curve in curve_strategy(), s in -10.0..10.0f64) {
        let f = FramedCurve::new(curve).unwrap().frenet_apparatus(s).unwrap();
        for v in [f.tangent, f.normal, f.binormal] {
            prop_assert!((v.norm() - 1.0).abs() <= 1e-12);
        }
        prop_assert!(f.tangent.dot(&f.normal).abs() <= 1e-12);
        prop_assert!(f.tangent.dot(&f.binormal).abs() <= 1e-12);
        prop_assert!((f.tangent.cross(&f.normal) - f.binormal).norm() <= 1e-12);
    }

    #[test]
    fn sphere_incidence_and_radius_identity(surf in surface_strategy(), (s, t) in point_strategy()) {
        let jet = surf.jet(s).unwrap();
        let r = jet.radius.r;
        let offset = jet.point(t) - jet.frame.position;
        prop_assert!((offset.norm() - r).abs() <= 1e-12 * r);
        let (big_r, q) = (jet.tube.r(), jet.tube.q());
        prop_assert!((big_r * big_r + q * q - r * r).abs() <= 1e-12 * r * r);
    }

    #[test]
    fn normal_is_radial(surf in surface_strategy(), (s, t) in point_strategy()) {
        if let Ok(n) = surf.normal(s, t) {
            let jet = surf.jet(s).unwrap();
            let offset = jet.point(t) - jet.frame.position;
            prop_assert!(n.cross(&offset).norm() <= 1e-8 * jet.radius.r);
        }
    }

    #[test]
    fn curvature_identities(surf in surface_strategy(), (s, t) in point_strategy()) {
        prop_assume!(surf.is_regular(s, t).unwrap());
        let forms = surf.forms(s, t).unwrap();
        let jet = surf.jet(s).unwrap();
        let k = gaussian(&surf, s, t).unwrap();
        let h = mean(&surf, s, t).unwrap();
        prop_assert!(common::rel(jet.area2_expanded(t), forms.area2) <= 1e-10);
        prop_assert!(common::rel(k, forms.gaussian()) <= 1e-9);
        prop_assert!(common::rel(h, forms.mean()) <= 1e-9);
        prop_assert!(h * h >= k - 1e-10 * (1.0 + k * k));
        prop_assert!(forms.E >= 0.0 && forms.G >= 0.0 && forms.area2 >= -1e-12);
    }

    #[test]
    fn closed_forms_match_oracle(surf in surface_strategy(), (s, t) in point_strategy()) {
        let jet = surf.jet(s).unwrap();
        // keep the stencil away from the focal set
        prop_assume!(jet.orientation_factor(t).abs() > 0.2);
        let oracle = surf.forms_oracle(s, t, ORACLE_STEP).unwrap();
        for (a, b) in surf.forms(s, t).unwrap().as_array().iter().zip(oracle.as_array()) {
            prop_assert!(common::rel(*a, b) <= 1e-7, "{} vs {}", a, b);
        }
    }

    #[test]
    fn tubes_and_revolutions_are_weingarten(
        curve in curve_strategy(),
        radius in radius_strategy(),
        sign in sign_strategy(),
        (s, t) in point_strategy(),
    ) {
        let straight = matches!(curve, CurveSpec::Line { .. });
        let tube = matches!(radius, RadiusSpec::Constant { .. });
        prop_assume!(straight || tube);
        let surf = common::build(curve, radius, sign, WINDOW);
        prop_assume!(surf.jet(s).unwrap().orientation_factor(t).abs() > 0.2);
        for pair in CurvaturePair::ALL {
            match jacobi(&surf, pair, s, t, 1e-3) {
                Ok(v) => prop_assert!(v.scaled() <= 1e-6, "{}: {:?}", pair, v),
                Err(e) => prop_assert!(e.is_pointwise_degeneracy()),
            }
        }
    }

    #[test]
    fn tube_curvatures_are_even_in_t(
        a in 0.2..2.0f64, b in -2.0..2.0f64, value in 0.2..3.0f64, sign in sign_strategy(),
        (s, t) in point_strategy(),
    ) {
        let surf = common::build(CurveSpec::Helix { a, b }, RadiusSpec::Constant { value }, sign, WINDOW);
        let mirror = std::f64::consts::TAU - t;
        if let (Ok(k1), Ok(k2)) = (gaussian(&surf, s, t), gaussian(&surf, s, mirror)) {
            prop_assert!(common::rel(k1, k2) <= 1e-10);
            prop_assert!(common::rel(mean(&surf, s, t).unwrap(), mean(&surf, s, mirror).unwrap()) <= 1e-10);
        }
        if let (Ok(x), Ok(y)) = (second_gaussian(&surf, s, t), second_gaussian(&surf, s, mirror)) {
            prop_assert!(common::rel(x, y) <= 1e-10);
        }
    }

    #[test]
    fn sign_branches_trace_the_same_surface(surf in surface_strategy(), (s, t) in point_strategy()) {
        let other = surf.with_sign(match surf.sign() { Sign::Plus => Sign::Minus, Sign::Minus => Sign::Plus });
        let shifted = t + std::f64::consts::PI;
        prop_assert!((surf.evaluate(s, t).unwrap() - other.evaluate(s, shifted).unwrap()).norm() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn residual_scales_with_coefficients(lambda in prop_oneof![-5.0..-0.1f64, 0.1..5.0f64]) {
        let fx = common::helix_tube();
        let grid = ParamGrid::new(fx.surface.s_range(), GridSpec { ns: 5, nt: 17, t_exclude: 0.1 });
        let base = [0.3, -0.7, 0.0, 0.2];
        let scaled = base.map(|c| c * lambda);
        let r0 = linear_residual(&fx.surface, base, &grid).unwrap();
        let r1 = linear_residual(&fx.surface, scaled, &grid).unwrap();
        prop_assert!((r1 - lambda.abs() * r0).abs() <= 1e-12 * r1.max(1.0));
    }

    #[test]
    fn regularity_check_is_deterministic(curve in curve_strategy(), radius in radius_strategy()) {
        let curve = FramedCurve::new(curve).unwrap();
        let window = Interval::new(WINDOW.0, WINDOW.1).unwrap();
        let a = regularity_check(&curve, &radius, window, 257);
        let b = regularity_check(&curve.clone(), &radius.clone(), window, 257);
        prop_assert_eq!(a, b);
    }
}

#[test]
fn tube_fit_with_full_mask_contains_tube_identity() {
    let fx = common::helix_tube();
    let grid = ParamGrid::new(fx.surface.s_range(), GridSpec { ns: 9, nt: 65, t_exclude: 0.1 });
    let fit = fit_linear(&fx.surface, FitMask::KHKII, &grid).unwrap();
    assert!(fit.residual <= 1e-7, "{fit:?}");
    assert!(fit.coeffs[2].abs() <= 1e-6, "{fit:?}");
    let [a, b, _, d] = fit.coeffs;
    assert!((a - b).abs() <= 1e-6 && (a + 4.0 * d).abs() <= 1e-6, "{fit:?}");
}

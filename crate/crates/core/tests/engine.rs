use std::f64::consts::SQRT_2;

use proptest::prelude::*;

use bsbond::bs_engine::{
    gradient_bounds, solve_gradient, solve_value, value_bounds, QuadratureConfig, TVProblem,
};
use bsbond::payoff::PiecewisePayoff;
use bsbond::term_model::{CoefficientCurves, Curve};

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn ncdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

#[test]
fn constant_source_accrues_linearly_without_discounting() {
    let prob = TVProblem::new(
        CoefficientCurves::constant(0.0, 0.03, 0.2),
        PiecewisePayoff::zero(),
        PiecewisePayoff::constant(0.7),
        2.0,
    )
    .unwrap();
    for x in [0.3, 1.0, 4.0] {
        let v = solve_value(&prob, x, 0.5, &cfg()).unwrap();
        assert!((v - 0.7 * 1.5).abs() < 1e-12, "{v}");
    }
}

#[test]
fn digital_under_piecewise_vol_matches_lognormal_probability() {
    let knots = vec![0.25, 0.75];
    let curves = CoefficientCurves::from_vol(
        Curve::piecewise_constant(knots.clone(), vec![0.01, 0.04, 0.02]).unwrap(),
        Curve::constant(0.0),
        &Curve::piecewise_constant(knots, vec![0.1, 0.5, 0.2]).unwrap(),
    );
    let prob = TVProblem::homogeneous(curves, PiecewisePayoff::digital(1.2).unwrap(), 1.0).unwrap();
    let r_bar = 0.01 * 0.25 + 0.04 * 0.5 + 0.02 * 0.25;
    let var = 0.01 * 0.25 + 0.25 * 0.5 + 0.04 * 0.25;
    for x in [0.8, 1.2, 1.7] {
        let d = ((x / 1.2f64).ln() + r_bar - 0.5 * var) / f64::sqrt(var);
        let want = (-r_bar).exp() * ncdf(d);
        let got = solve_value(&prob, x, 0.0, &cfg()).unwrap();
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn value_at_horizon_is_the_payoff() {
    let f = PiecewisePayoff::bond_terminal(1.1, 1.1, 0.6).unwrap();
    let prob = TVProblem::homogeneous(CoefficientCurves::constant(0.05, 0.0, 0.3), f.clone(), 1.0)
        .unwrap();
    for x in [0.5, 1.1, 2.0] {
        assert_eq!(
            solve_value(&prob, x, 1.0, &cfg()).unwrap(),
            f.eval(x).unwrap()
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn put_call_parity(
        r in 0.0..0.1f64,
        q in 0.0..0.08f64,
        sigma in 0.05..0.6f64,
        k in 0.5..2.0f64,
        x in 0.3..3.0f64,
        tau in 0.1..3.0f64,
    ) {
        let curves = CoefficientCurves::constant(r, q, sigma);
        let call = TVProblem::homogeneous(curves.clone(), PiecewisePayoff::call(k).unwrap(), tau).unwrap();
        let put = TVProblem::homogeneous(curves, PiecewisePayoff::put(k).unwrap(), tau).unwrap();
        let lhs = solve_value(&call, x, 0.0, &cfg()).unwrap() - solve_value(&put, x, 0.0, &cfg()).unwrap();
        let rhs = x * (-q * tau).exp() - k * (-r * tau).exp();
        prop_assert!((lhs - rhs).abs() < 1e-8 * (1.0 + x + k), "{} vs {}", lhs, rhs);
    }

    #[test]
    fn call_is_homogeneous_of_degree_one(
        scale in 0.2..5.0f64,
        x in 0.5..2.0f64,
        sigma in 0.1..0.5f64,
    ) {
        let curves = CoefficientCurves::constant(0.03, 0.01, sigma);
        let base = TVProblem::homogeneous(curves.clone(), PiecewisePayoff::call(1.0).unwrap(), 1.0).unwrap();
        let scaled = TVProblem::homogeneous(curves, PiecewisePayoff::call(scale).unwrap(), 1.0).unwrap();
        let a = scale * solve_value(&base, x, 0.0, &cfg()).unwrap();
        let b = solve_value(&scaled, scale * x, 0.0, &cfg()).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * scale.max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn solutions_stay_inside_envelopes(
        weights in prop::collection::vec(-1.0..1.0f64, 3),
        strikes in prop::collection::vec(0.5..2.0f64, 3),
        level in -1.0..1.0f64,
        source in -0.5..0.5f64,
        x in 0.2..5.0f64,
        t in 0.0..0.99f64,
    ) {
        let mut f = PiecewisePayoff::constant(level);
        for (w, k) in weights.iter().zip(&strikes) {
            f = f.sum(&PiecewisePayoff::from_polys(vec![*k], vec![vec![0.0], vec![*w]]).unwrap()).unwrap();
        }
        let prob = TVProblem::new(
            CoefficientCurves::constant(0.04, 0.01, 0.25),
            f,
            PiecewisePayoff::constant(source),
            1.0,
        ).unwrap();
        let (lo, hi) = value_bounds(&prob, t).unwrap();
        let v = solve_value(&prob, x, t, &cfg()).unwrap();
        prop_assert!(v >= lo - 1e-10 && v <= hi + 1e-10);
        let (glo, ghi) = gradient_bounds(&prob, t).unwrap();
        let g = solve_gradient(&prob, x, t, &cfg()).unwrap();
        prop_assert!(g >= glo - 1e-8 && g <= ghi + 1e-8, "{} not in [{}, {}]", g, glo, ghi);
    }
}

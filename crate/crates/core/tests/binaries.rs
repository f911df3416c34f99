use std::f64::consts::SQRT_2;

use proptest::prelude::*;

use bsbond::binaries::{
    binary_price, bvn_cdf, mvn_cdf, BinaryKind, BinaryModel, BinarySpec, MvnConfig, MvnProblem,
    Sign,
};
use bsbond::bs_engine::{solve_value, QuadratureConfig, TVProblem};
use bsbond::payoff::PiecewisePayoff;
use bsbond::term_model::CoefficientCurves;

fn ncdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

fn identity(m: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

#[test]
fn first_order_bond_binary_is_discounted_probability() {
    let (lambda, b, sigma) = (0.04, 0.02, 0.3);
    let model = BinaryModel::constant_vol(lambda, b, sigma);
    let spec = BinarySpec::new(BinaryKind::Bond, vec![Sign::Plus], vec![1.1], vec![2.0]).unwrap();
    for x in [0.6, 1.1, 2.5] {
        let sd = sigma * 2f64.sqrt();
        let d = ((x / 1.1f64).ln() - 2.0 * b - 0.5 * sd * sd) / sd;
        let want = (-2.0 * lambda).exp() * ncdf(d);
        let got = binary_price(&model, &spec, x, 0.0, &MvnConfig::default()).unwrap();
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    }
}

#[test]
fn asset_binary_agrees_with_the_kernel_solver() {
    let (lambda, b, sigma) = (0.05, 0.03, 0.2);
    let model = BinaryModel::constant_vol(lambda, b, sigma);
    let spec = BinarySpec::new(BinaryKind::Asset, vec![Sign::Plus], vec![0.9], vec![1.5]).unwrap();
    let asset_or_nothing =
        PiecewisePayoff::from_polys(vec![0.9], vec![vec![0.0], vec![0.0, 1.0]]).unwrap();
    let prob = TVProblem::homogeneous(
        CoefficientCurves::constant(lambda, lambda + b, sigma),
        asset_or_nothing,
        1.5,
    )
    .unwrap();
    for x in [0.5, 0.9, 1.6] {
        let a = binary_price(&model, &spec, x, 0.0, &MvnConfig::default()).unwrap();
        let v = solve_value(&prob, x, 0.0, &QuadratureConfig::default()).unwrap();
        assert!((a - v).abs() < 1e-9, "{a} vs {v}");
    }
}

#[test]
fn bivariate_limits() {
    assert!((bvn_cdf(0.0, 0.0, 0.0) - 0.25).abs() < 1e-15);
    assert!((bvn_cdf(0.3, 0.3, 1.0) - ncdf(0.3)).abs() < 1e-12);
    assert!(bvn_cdf(0.3, -0.3, -1.0).abs() < 1e-12);
    let rho = 0.5f64;
    let orthant = 0.25 + rho.asin() / (2.0 * std::f64::consts::PI);
    assert!((bvn_cdf(0.0, 0.0, rho) - orthant).abs() < 1e-14);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sign_split_recovers_lower_order(
        k1 in 0.6..1.6f64,
        k2 in 0.6..1.6f64,
        x in 0.5..2.0f64,
        sigma in 0.1..0.4f64,
    ) {
        let model = BinaryModel::constant_vol(0.02, 0.01, sigma);
        let cfg = MvnConfig::default();
        let price = |signs: Vec<Sign>, strikes: Vec<f64>, expiries: Vec<f64>| {
            binary_price(&model, &BinarySpec::new(BinaryKind::Bond, signs, strikes, expiries).unwrap(), x, 0.0, &cfg).unwrap()
        };
        let plus = price(vec![Sign::Plus, Sign::Plus], vec![k1, k2], vec![1.0, 2.0]);
        let minus = price(vec![Sign::Plus, Sign::Minus], vec![k1, k2], vec![1.0, 2.0]);
        let single = price(vec![Sign::Plus], vec![k1], vec![1.0]) * (-0.02f64).exp();
        prop_assert!((plus + minus - single).abs() < 1e-9, "{} + {} vs {}", plus, minus, single);
    }

    #[test]
    fn independent_coordinates_factorise(
        limits in prop::collection::vec(-2.5..2.5f64, 2..=5),
    ) {
        let m = limits.len();
        let p = MvnProblem { upper_limits: limits.clone(), correlation: identity(m) };
        let got = mvn_cdf(&p, &MvnConfig::default()).unwrap().value;
        let want: f64 = limits.iter().map(|&a| ncdf(a)).product();
        prop_assert!((got - want).abs() < 1e-7, "{} vs {}", got, want);
    }

    #[test]
    fn bivariate_is_symmetric_and_monotone(
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        rho in -0.99..0.99f64,
        step in 0.0..1.0f64,
    ) {
        let p = bvn_cdf(a, b, rho);
        prop_assert!((p - bvn_cdf(b, a, rho)).abs() < 1e-14);
        prop_assert!(bvn_cdf(a + step, b, rho) >= p - 1e-15);
        prop_assert!(p <= ncdf(a).min(ncdf(b)) + 1e-15);
        prop_assert!(p >= (ncdf(a) + ncdf(b) - 1.0).max(0.0) - 1e-15);
    }
}

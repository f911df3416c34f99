use proptest::prelude::*;

use bsbond::bs_engine::{solve_value, value_bounds, QuadratureConfig, TVProblem};
use bsbond::coupon_bond::{compute_barriers, BondConfig, BondTermSheet};
use bsbond::oracles::{fd_solve_reduced, mc_bond_price, FdConfig, McConfig};
use bsbond::payoff::PiecewisePayoff;
use bsbond::term_model::{CoefficientCurves, FirmParams, VasicekParams};

fn sheet() -> BondTermSheet {
    BondTermSheet::new(
        1.0,
        vec![0.06; 2],
        vec![1.0, 2.0],
        0.8,
        0.1,
        FirmParams::new(0.15, 0.05, 0.5).unwrap(),
        VasicekParams::new(0.02, 0.379, 0.077).unwrap(),
    )
    .unwrap()
}

fn mc(seed: u64, antithetic: bool) -> McConfig {
    McConfig {
        paths: 20_000,
        steps_per_year: 50,
        seed,
        antithetic,
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let sheet = sheet();
    let set = compute_barriers(&sheet, &BondConfig::default()).unwrap();
    for antithetic in [false, true] {
        let a = mc_bond_price(&sheet, 1.5, 0.05, &set, &mc(5, antithetic)).unwrap();
        let b = mc_bond_price(&sheet, 1.5, 0.05, &set, &mc(5, antithetic)).unwrap();
        assert_eq!(a, b);
        let c = mc_bond_price(&sheet, 1.5, 0.05, &set, &mc(6, antithetic)).unwrap();
        assert_ne!(a.price, c.price);
        assert!((a.price - c.price).abs() < 6.0 * a.std_error);
    }
}

#[test]
fn finite_differences_price_a_call() {
    let prob = TVProblem::homogeneous(
        CoefficientCurves::constant(0.05, 0.01, 0.3),
        PiecewisePayoff::call(1.0).unwrap(),
        1.0,
    )
    .unwrap();
    let fd = fd_solve_reduced(
        &prob,
        &FdConfig {
            space_nodes: 400,
            time_steps: 200,
            ..FdConfig::default()
        },
    )
    .unwrap();
    for x in [0.8, 1.0, 1.3] {
        let exact = solve_value(&prob, x, 0.0, &QuadratureConfig::default()).unwrap();
        assert!((fd.value(x, 0.0).unwrap() / exact - 1.0).abs() < 1e-3);
    }
}

#[test]
fn finite_difference_config_is_validated() {
    let prob = TVProblem::homogeneous(
        CoefficientCurves::constant(0.05, 0.0, 0.2),
        PiecewisePayoff::digital(1.0).unwrap(),
        1.0,
    )
    .unwrap();
    for cfg in [
        FdConfig {
            space_nodes: 2,
            ..FdConfig::default()
        },
        FdConfig {
            theta: 1.5,
            ..FdConfig::default()
        },
        FdConfig {
            t_end: 1.0,
            ..FdConfig::default()
        },
    ] {
        assert!(fd_solve_reduced(&prob, &cfg).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn finite_differences_respect_the_envelope(
        k in 0.7..1.5f64,
        level in -1.0..1.0f64,
        jump in -1.0..1.0f64,
        source in -0.3..0.3f64,
        sigma in 0.1..0.5f64,
    ) {
        let f = PiecewisePayoff::from_polys(vec![k], vec![vec![level], vec![level + jump]]).unwrap();
        let prob = TVProblem::new(
            CoefficientCurves::constant(0.03, 0.02, sigma),
            f,
            PiecewisePayoff::constant(source),
            1.0,
        ).unwrap();
        let fd = fd_solve_reduced(&prob, &FdConfig { space_nodes: 200, time_steps: 100, ..FdConfig::default() }).unwrap();
        let (lo, hi) = value_bounds(&prob, 0.0).unwrap();
        for v in fd.final_values() {
            prop_assert!(*v >= lo - 1e-6 && *v <= hi + 1e-6, "{} not in [{}, {}]", v, lo, hi);
        }
    }
}

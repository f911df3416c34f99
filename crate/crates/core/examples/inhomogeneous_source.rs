//! Piecewise constant rates and volatility with a running payoff
//! `lambda * min(cap, delta * x)`, the shape of a recovery stream.

use bsbond::bs_engine::{
    asymptotic_limits, solve_value, value_bounds, QuadratureConfig, TVProblem,
};
use bsbond::payoff::PiecewisePayoff;
use bsbond::term_model::{CoefficientCurves, Curve};

fn main() -> bsbond::Result<()> {
    let rate = Curve::piecewise_constant(vec![1.0], vec![0.02, 0.04])?;
    let dividend = Curve::constant(0.01);
    let vol = Curve::piecewise_constant(vec![0.5, 1.5], vec![0.3, 0.2, 0.25])?;
    let curves = CoefficientCurves::from_vol(rate, dividend, &vol);

    let terminal = PiecewisePayoff::bond_terminal(1.05, 1.05, 0.6)?;
    let source = PiecewisePayoff::min_with_cap(0.08, 0.6, 1.1)?;
    let prob = TVProblem::new(curves, terminal, source, 2.0)?;
    let cfg = QuadratureConfig::default();

    let (lo, hi) = value_bounds(&prob, 0.0)?;
    let limits = asymptotic_limits(&prob, 0.0)?;
    println!("envelope [{lo:.6}, {hi:.6}]");
    println!(
        "u(0+) = {:.6}, u(inf) = {:.6}",
        limits.value_at_zero, limits.value_at_infinity
    );
    for x in [0.25, 0.5, 1.0, 1.5, 2.5, 5.0] {
        println!("u({x:4.2}, 0) = {:.8}", solve_value(&prob, x, 0.0, &cfg)?);
    }
    Ok(())
}

//! Value, gradient and curvature of a cash-or-nothing digital. The gradient
//! carries the jump of the payoff at the strike.

use bsbond::bs_engine::{
    solve_gradient, solve_second_derivative, solve_value, QuadratureConfig, TVProblem,
};
use bsbond::payoff::PiecewisePayoff;
use bsbond::term_model::CoefficientCurves;

fn main() -> bsbond::Result<()> {
    let prob = TVProblem::homogeneous(
        CoefficientCurves::constant(0.03, 0.0, 0.2),
        PiecewisePayoff::digital(1.0)?,
        0.5,
    )?;
    let cfg = QuadratureConfig::default();
    println!("x,value,gradient,second");
    for k in 0..=20 {
        let x = 0.7 + 0.03 * k as f64;
        println!(
            "{x:.2},{:.8},{:.8},{:.8}",
            solve_value(&prob, x, 0.0, &cfg)?,
            solve_gradient(&prob, x, 0.0, &cfg)?,
            solve_second_derivative(&prob, x, 0.0, &cfg)?
        );
    }
    Ok(())
}

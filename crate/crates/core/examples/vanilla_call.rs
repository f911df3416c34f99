//! A European call as a terminal value problem, against the textbook formula.

use bsbond::bs_engine::{solve_gradient, solve_value, QuadratureConfig, TVProblem};
use bsbond::math::normal::cdf;
use bsbond::payoff::PiecewisePayoff;
use bsbond::term_model::CoefficientCurves;

fn main() -> bsbond::Result<()> {
    let (r, q, sigma, strike, expiry) = (0.05, 0.02, 0.25, 100.0, 1.0);
    let prob = TVProblem::homogeneous(
        CoefficientCurves::constant(r, q, sigma),
        PiecewisePayoff::call(strike)?,
        expiry,
    )?;
    let cfg = QuadratureConfig::default();

    println!(
        "{:>8} {:>14} {:>14} {:>10}",
        "spot", "kernel", "formula", "delta"
    );
    for spot in [70.0, 90.0, 100.0, 110.0, 130.0] {
        let tau: f64 = expiry;
        let d1 =
            ((spot / strike).ln() + (r - q + 0.5 * sigma * sigma) * tau) / (sigma * tau.sqrt());
        let d2 = d1 - sigma * tau.sqrt();
        let formula = spot * (-q * tau).exp() * cdf(d1) - strike * (-r * tau).exp() * cdf(d2);
        let value = solve_value(&prob, spot, 0.0, &cfg)?;
        let delta = solve_gradient(&prob, spot, 0.0, &cfg)?;
        println!("{spot:>8.1} {value:>14.10} {formula:>14.10} {delta:>10.6}");
    }
    Ok(())
}

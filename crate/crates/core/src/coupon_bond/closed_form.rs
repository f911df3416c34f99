//! Bond prices as sums of higher order binaries and their time integrals.

use super::{BarrierSet, BondConfig, BondTermSheet};
use crate::binaries::{
    binary_price, binary_time_integral, correlation_from_variances, minus_variant, mvn_cdf,
    BinaryKind, BinarySpec, BinaryStrip, MvnProblem, Sign, DIMENSION_CAP,
};
use crate::error::{Error, Result};
use crate::math::quadrature::{integrate_panels, Tolerance};

fn check_inputs(sheet: &BondTermSheet, barriers: &BarrierSet) -> Result<()> {
    sheet.validate()?;
    if barriers.barriers.len() != sheet.n() {
        return Err(Error::Domain(format!(
            "expected {} barriers, got {}",
            sheet.n(),
            barriers.barriers.len()
        )));
    }
    if barriers.barriers.iter().any(|k| !(*k >= 0.0)) {
        return Err(Error::Domain("barriers must be nonnegative".into()));
    }
    if sheet.n() > DIMENSION_CAP {
        return Err(Error::DimensionCap {
            order: sheet.n(),
            cap: DIMENSION_CAP,
        });
    }
    Ok(())
}

/// `u_i(x, t)` from the binary representation, for the interval containing `t`.
pub fn price_closed_form_deflated(
    sheet: &BondTermSheet,
    barriers: &BarrierSet,
    x: f64,
    t: f64,
    cfg: &BondConfig,
) -> Result<f64> {
    check_inputs(sheet, barriers)?;
    let n = sheet.n();
    let i = sheet.bracket(t)?;
    let model = sheet.binary_model();
    let delta = sheet.recovery;
    let mut total = 0.0;
    for m in i..n {
        let strikes: Vec<f64> = (i + 1..=m + 1).map(|k| barriers.k(k)).collect();
        let expiries: Vec<f64> = (i + 1..=m + 1).map(|k| sheet.date(k)).collect();
        let order = strikes.len();
        let plus = vec![Sign::Plus; order];
        let spec = BinarySpec::new(
            BinaryKind::Bond,
            plus.clone(),
            strikes.clone(),
            expiries.clone(),
        )?;
        total += sheet.c_bar(m + 1) * binary_price(&model, &spec, x, t, &cfg.mvn)?;
        if delta > 0.0 {
            let mut signs = plus;
            signs[order - 1] = Sign::Minus;
            let spec = BinarySpec::new(BinaryKind::Asset, signs, strikes, expiries)?;
            total += delta * binary_price(&model, &spec, x, t, &cfg.mvn)?;
        }
    }
    if delta > 0.0 && sheet.intensity > 0.0 {
        for m in i..n {
            let ta = if m == i { t } else { sheet.date(m) };
            let tb = sheet.date(m + 1);
            if !(ta < tb) {
                continue;
            }
            let phi = sheet.phi(m);
            let strip = BinaryStrip {
                prefix_strikes: (i + 1..=m).map(|k| barriers.k(k)).collect(),
                prefix_expiries: (i + 1..=m).map(|k| sheet.date(k)).collect(),
                last_strike: phi / delta,
                bond_weight: phi,
                asset_weight: delta,
            };
            total += binary_time_integral(&model, &strip, x, t, ta, tb, &cfg.mvn)?;
        }
    }
    Ok(total)
}

/// Bond price `Z(r, t; T_N) u_i(V / Z, t)` from the binary representation.
pub fn price_closed_form(
    sheet: &BondTermSheet,
    barriers: &BarrierSet,
    v: f64,
    r: f64,
    t: f64,
    cfg: &BondConfig,
) -> Result<f64> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Domain(format!(
            "firm value must be positive, got {v}"
        )));
    }
    let z = sheet.discount(r, t)?;
    Ok(z * price_closed_form_deflated(sheet, barriers, v / z, t, cfg)?)
}

/// `(ln(x / K) - b T +- S / 2) / sqrt(S)` with `S = int_0^T sigma^2`.
fn d_pair(log_x: f64, k: f64, b_t: f64, s: f64) -> (f64, f64) {
    if k == 0.0 {
        return (f64::INFINITY, f64::INFINITY);
    }
    let root = s.sqrt();
    let base = log_x - k.ln() - b_t;
    ((base - 0.5 * s) / root, (base + 0.5 * s) / root)
}

/// Initial bond price written out in terms of multivariate normal distribution
/// functions of the firm value `V_0`, the discount factor `Z_0` and the barriers.
pub fn initial_price_formula(
    sheet: &BondTermSheet,
    barriers: &BarrierSet,
    v0: f64,
    r0: f64,
    cfg: &BondConfig,
) -> Result<f64> {
    check_inputs(sheet, barriers)?;
    if !(v0 > 0.0) || !v0.is_finite() {
        return Err(Error::Domain(format!(
            "firm value must be positive, got {v0}"
        )));
    }
    let n = sheet.n();
    let (lambda, b, delta) = (sheet.intensity, sheet.firm.b, sheet.recovery);
    let z0 = sheet.discount(r0, 0.0)?;
    let log_x = (v0 / z0).ln();
    let var = sheet.binary_model().variance;
    let cum: Vec<f64> = (1..=n).map(|k| var.integral(0.0, sheet.date(k))).collect();
    let (mut dm, mut dp) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for k in 1..=n {
        let (lo, hi) = d_pair(log_x, barriers.k(k), b * sheet.date(k), cum[k - 1]);
        dm.push(lo);
        dp.push(hi);
    }
    let mvn = |limits: Vec<f64>, corr: Vec<Vec<f64>>| -> Result<f64> {
        Ok(mvn_cdf(
            &MvnProblem {
                upper_limits: limits,
                correlation: corr,
            },
            &cfg.mvn,
        )?
        .value)
    };

    let mut survival = 0.0;
    for m in 0..n {
        let a = correlation_from_variances(&cum[..=m]);
        let tm = sheet.date(m + 1);
        survival += sheet.c_bar(m + 1) * (-lambda * tm).exp() * mvn(dm[..=m].to_vec(), a)?;
    }
    let mut recovery = 0.0;
    if delta > 0.0 {
        for m in 0..n {
            let a_minus = minus_variant(&correlation_from_variances(&cum[..=m]));
            let mut limits = dp[..=m].to_vec();
            limits[m] = -limits[m];
            let tm = sheet.date(m + 1);
            recovery += (-(lambda + b) * tm).exp() * mvn(limits, a_minus)?;
        }
    }

    let mut intensity_part = 0.0;
    if delta > 0.0 && lambda > 0.0 {
        let tol = if cfg.mvn.is_deterministic(n) {
            Tolerance::new(1e-11, 1e-10)
        } else {
            Tolerance::new(10.0 * cfg.mvn.abs_tol, 1e-8)
        };
        for m in 0..n {
            let (ta, tb) = (sheet.date(m), sheet.date(m + 1));
            let phi = sheet.phi(m);
            let log_ratio = (delta * v0 / (z0 * phi)).ln();
            let integrand = |u: f64| -> Result<f64> {
                let tau = ta + u * u;
                if u == 0.0 {
                    return Ok(0.0);
                }
                let s_tau = var.integral(0.0, tau);
                let mut v: Vec<f64> = cum[..m].to_vec();
                v.push(s_tau);
                let a_tilde = correlation_from_variances(&v);
                let a_tilde_minus = minus_variant(&a_tilde);
                let root = s_tau.sqrt();
                let base = log_ratio - b * tau;
                let (dt_minus, dt_plus) =
                    ((base - 0.5 * s_tau) / root, (base + 0.5 * s_tau) / root);
                let mut lim_asset = dp[..m].to_vec();
                lim_asset.push(-dt_plus);
                let mut lim_bond = dm[..m].to_vec();
                lim_bond.push(dt_minus);
                let asset =
                    delta * v0 * (-(lambda + b) * tau).exp() * mvn(lim_asset, a_tilde_minus)?;
                let bond = phi * z0 * (-lambda * tau).exp() * mvn(lim_bond, a_tilde)?;
                Ok(2.0 * u * (asset + bond))
            };
            let mut knots = vec![0.0];
            for &k in var.knots() {
                if k > ta && k < tb {
                    knots.push((k - ta).sqrt());
                }
            }
            knots.push((tb - ta).sqrt());
            intensity_part += integrate_panels(integrand, &knots, tol)?;
        }
    }
    Ok(z0 * survival + delta * v0 * recovery + lambda * intensity_part)
}

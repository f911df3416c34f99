//! Higher order bond and asset binaries under a constant rate `lambda`, a
//! constant dividend yield `lambda + b` and a time dependent volatility.
//!
//! An m-th order binary with signs `s_i`, strikes `K_i` and expiries
//! `T_1 < ... < T_m` pays at `T_m` one unit (bond) or the underlying (asset)
//! if `s_i (X(T_i) - K_i) > 0` for every `i`.

pub mod mvn;

pub use mvn::{bvn_cdf, mvn_cdf, MvnConfig, MvnEstimate, MvnProblem, DIMENSION_CAP};

use crate::error::{domain, Result};
use crate::math::quadrature::{integrate_panels, Tolerance};
use crate::term_model::Curve;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryKind {
    Bond,
    Asset,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Rate `lambda`, dividend yield `lambda + b` and variance curve `sigma^2(t)`.
#[derive(Debug, Clone)]
pub struct BinaryModel {
    pub lambda: f64,
    pub b: f64,
    pub variance: Curve,
}

impl BinaryModel {
    pub fn new(lambda: f64, b: f64, variance: Curve) -> Self {
        Self {
            lambda,
            b,
            variance,
        }
    }

    pub fn constant_vol(lambda: f64, b: f64, sigma: f64) -> Self {
        Self::new(lambda, b, Curve::constant(sigma * sigma))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinarySpec {
    pub kind: BinaryKind,
    pub signs: Vec<Sign>,
    pub strikes: Vec<f64>,
    pub expiries: Vec<f64>,
}

impl BinarySpec {
    pub fn new(
        kind: BinaryKind,
        signs: Vec<Sign>,
        strikes: Vec<f64>,
        expiries: Vec<f64>,
    ) -> Result<Self> {
        let m = signs.len();
        if m == 0 || strikes.len() != m || expiries.len() != m {
            return domain("a binary needs matching, nonempty sign, strike and expiry vectors");
        }
        if strikes.iter().any(|k| !(*k >= 0.0)) {
            return domain("binary strikes must be nonnegative");
        }
        if expiries.windows(2).any(|w| !(w[1] > w[0])) || expiries.iter().any(|e| !e.is_finite()) {
            return domain("binary expiries must be finite and strictly increasing");
        }
        Ok(Self {
            kind,
            signs,
            strikes,
            expiries,
        })
    }

    pub fn order(&self) -> usize {
        self.signs.len()
    }
}

/// Correlation matrix `r_ij = sqrt(v_i / v_j)` for `i <= j`, with
/// `v_i = sigma_bar^2(t, T_i)`. The last expiry may be replaced by `tau`.
pub fn correlation_matrix(
    expiries: &[f64],
    t: f64,
    variance: &Curve,
    final_time_override: Option<f64>,
) -> Result<Vec<Vec<f64>>> {
    let mut times = expiries.to_vec();
    if let Some(tau) = final_time_override {
        let m = times.len();
        if m >= 2 && !(tau > times[m - 2]) {
            return domain("override time must follow the previous expiry");
        }
        times[m - 1] = tau;
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return domain("expiries must be strictly increasing");
    }
    if times.first().is_some_and(|&t0| t0 < t) {
        return domain("expiries must not precede the valuation time");
    }
    let v: Vec<f64> = times.iter().map(|&ti| variance.integral(t, ti)).collect();
    Ok(correlation_from_variances(&v))
}

pub(crate) fn correlation_from_variances(v: &[f64]) -> Vec<Vec<f64>> {
    let m = v.len();
    let mut r = vec![vec![0.0; m]; m];
    for i in 0..m {
        r[i][i] = 1.0;
        for j in (i + 1)..m {
            let c = if v[i] > 0.0 && v[j] > 0.0 {
                (v[i] / v[j]).min(1.0).sqrt()
            } else {
                0.0
            };
            r[i][j] = c;
            r[j][i] = c;
        }
    }
    r
}

/// Negates the off-diagonal entries of the last row and column.
pub fn minus_variant(r: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let m = r.len();
    let mut out = r.to_vec();
    for i in 0..m.saturating_sub(1) {
        out[i][m - 1] = -out[i][m - 1];
        out[m - 1][i] = -out[m - 1][i];
    }
    out
}

/// Signed upper limits and correlation for a binary at `(x, t)`.
fn binary_problem(model: &BinaryModel, spec: &BinarySpec, x: f64, t: f64) -> Result<MvnProblem> {
    let m = spec.order();
    let shift = match spec.kind {
        BinaryKind::Bond => -0.5,
        BinaryKind::Asset => 0.5,
    };
    let v: Vec<f64> = spec
        .expiries
        .iter()
        .map(|&ti| model.variance.integral(t, ti))
        .collect();
    let mut limits = Vec::with_capacity(m);
    for i in 0..m {
        let k = spec.strikes[i];
        let s = spec.signs[i].factor();
        let lm = if k == 0.0 {
            f64::INFINITY
        } else if k == f64::INFINITY {
            f64::NEG_INFINITY
        } else {
            (x / k).ln()
        };
        let limit = if v[i] <= 0.0 {
            // expired leg: the event is known
            let above = x > k;
            let holds = match spec.signs[i] {
                Sign::Plus => above,
                Sign::Minus => !above,
            };
            if holds {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else if lm.is_infinite() {
            s * lm
        } else {
            let d = (lm - model.b * (spec.expiries[i] - t) + shift * v[i]) / v[i].sqrt();
            s * d
        };
        limits.push(limit);
    }
    let mut r = correlation_from_variances(&v);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                r[i][j] *= spec.signs[i].factor() * spec.signs[j].factor();
            }
        }
    }
    Ok(MvnProblem {
        upper_limits: limits,
        correlation: r,
    })
}

/// Price of a bond or asset binary at `(x, t)` with `t <= T_1`.
pub fn binary_price(
    model: &BinaryModel,
    spec: &BinarySpec,
    x: f64,
    t: f64,
    cfg: &MvnConfig,
) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("x must be positive, got {x}"));
    }
    if !(t <= spec.expiries[0]) {
        return domain("valuation time is after the first expiry");
    }
    let p = binary_problem(model, spec, x, t)?;
    let prob = mvn_cdf(&p, cfg)?.value;
    let tm = spec.expiries[spec.order() - 1] - t;
    Ok(match spec.kind {
        BinaryKind::Bond => (-model.lambda * tm).exp() * prob,
        BinaryKind::Asset => x * (-(model.lambda + model.b) * tm).exp() * prob,
    })
}

pub fn bond_binary_price(
    model: &BinaryModel,
    spec: &BinarySpec,
    x: f64,
    t: f64,
    cfg: &MvnConfig,
) -> Result<f64> {
    if spec.kind != BinaryKind::Bond {
        return domain("expected a bond binary");
    }
    binary_price(model, spec, x, t, cfg)
}

pub fn asset_binary_price(
    model: &BinaryModel,
    spec: &BinarySpec,
    x: f64,
    t: f64,
    cfg: &MvnConfig,
) -> Result<f64> {
    if spec.kind != BinaryKind::Asset {
        return domain("expected an asset binary");
    }
    binary_price(model, spec, x, t, cfg)
}

/// A family of binaries whose last expiry `tau` runs over an interval.
///
/// The integrand is `bond_weight * B^{+...++}(tau) + asset_weight * A^{+...+-}(tau)`
/// with strikes `prefix_strikes` at `prefix_expiries` followed by `last_strike` at `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryStrip {
    pub prefix_strikes: Vec<f64>,
    pub prefix_expiries: Vec<f64>,
    pub last_strike: f64,
    pub bond_weight: f64,
    pub asset_weight: f64,
}

/// `lambda * int_{ta}^{tb} [strip integrand](x, t; tau) dtau`.
pub fn binary_time_integral(
    model: &BinaryModel,
    strip: &BinaryStrip,
    x: f64,
    t: f64,
    ta: f64,
    tb: f64,
    cfg: &MvnConfig,
) -> Result<f64> {
    if !(t <= ta && ta < tb) {
        return domain("binary time integral needs t <= ta < tb");
    }
    if strip.prefix_strikes.len() != strip.prefix_expiries.len() {
        return domain("prefix strikes and expiries differ in length");
    }
    if strip.prefix_expiries.last().is_some_and(|&e| e > ta) {
        return domain("the integration interval must follow the prefix expiries");
    }
    if model.lambda == 0.0 {
        return Ok(0.0);
    }
    let m = strip.prefix_strikes.len() + 1;
    let mut strikes = strip.prefix_strikes.clone();
    strikes.push(strip.last_strike);
    let mut expiries = strip.prefix_expiries.clone();
    expiries.push(tb);
    let plus = vec![Sign::Plus; m];
    let mut minus = plus.clone();
    minus[m - 1] = Sign::Minus;
    let deterministic = cfg.is_deterministic(m);
    let tol = if deterministic {
        Tolerance::new(1e-11, 1e-10)
    } else {
        Tolerance::new(10.0 * cfg.abs_tol, 1e-8)
    };
    let integrand = |u: f64| -> Result<f64> {
        let tau = ta + u * u;
        if !(tau
            > strip
                .prefix_expiries
                .last()
                .copied()
                .unwrap_or(f64::NEG_INFINITY))
        {
            return Ok(0.0);
        }
        let mut e = expiries.clone();
        e[m - 1] = tau;
        let mut total = 0.0;
        if strip.bond_weight != 0.0 {
            let spec = BinarySpec {
                kind: BinaryKind::Bond,
                signs: plus.clone(),
                strikes: strikes.clone(),
                expiries: e.clone(),
            };
            total += strip.bond_weight * binary_price(model, &spec, x, t, cfg)?;
        }
        if strip.asset_weight != 0.0 {
            let spec = BinarySpec {
                kind: BinaryKind::Asset,
                signs: minus.clone(),
                strikes: strikes.clone(),
                expiries: e,
            };
            total += strip.asset_weight * binary_price(model, &spec, x, t, cfg)?;
        }
        Ok(2.0 * u * total)
    };
    let mut knots = vec![0.0];
    for &k in model.variance.knots() {
        if k > ta && k < tb {
            knots.push((k - ta).sqrt());
        }
    }
    knots.push((tb - ta).sqrt());
    Ok(model.lambda * integrate_panels(integrand, &knots, tol)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_parity() {
        let model = BinaryModel::constant_vol(0.04, 0.01, 0.25);
        let cfg = MvnConfig::default();
        let p = |kind, sign| {
            let spec = BinarySpec::new(kind, vec![sign], vec![1.1], vec![2.0]).unwrap();
            binary_price(&model, &spec, 0.9, 0.5, &cfg).unwrap()
        };
        let bond = p(BinaryKind::Bond, Sign::Plus) + p(BinaryKind::Bond, Sign::Minus);
        assert!((bond - (-0.04f64 * 1.5).exp()).abs() < 1e-15);
        let asset = p(BinaryKind::Asset, Sign::Plus) + p(BinaryKind::Asset, Sign::Minus);
        assert!((asset - 0.9 * (-0.05f64 * 1.5).exp()).abs() < 1e-15);
    }

    #[test]
    fn correlation_of_constant_vol() {
        let r = correlation_matrix(&[1.0, 4.0], 0.0, &Curve::constant(0.04), None).unwrap();
        assert!((r[0][1] - 0.5).abs() < 1e-15);
        let minus = minus_variant(&r);
        assert!((minus[1][0] + 0.5).abs() < 1e-15);
    }
}

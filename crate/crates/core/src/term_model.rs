//! Vasicek term structure, effective volatility of the deflated firm value and
//! integrated coefficient curves.
//!
//! All times are year fractions and all rates are continuously compounded.

use crate::error::{domain, Result};
use crate::math::quadrature::{gl_fixed, integrate, Tolerance};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Which drift coefficient multiplies `B(u, T)` in the first term of the
/// integral defining `A(t, T)`.
///
/// `Standard` uses the long-run drift `a1`, which is what the zero coupon bond
/// PDE produces and what a direct simulation of the short rate reproduces.
/// `Reversion` uses the mean reversion speed `a2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AConvention {
    Reversion,
    #[default]
    Standard,
}

/// Short rate dynamics `dr = (a1 - a2 r) dt + s_r dW1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VasicekParams {
    pub a1: f64,
    pub a2: f64,
    pub s_r: f64,
    pub convention: AConvention,
}

impl VasicekParams {
    pub fn new(a1: f64, a2: f64, s_r: f64) -> Result<Self> {
        if !(a2 > 0.0) || !a1.is_finite() || !a2.is_finite() {
            return domain(format!("Vasicek a2 must be positive, got {a2}"));
        }
        if !(s_r >= 0.0) || !s_r.is_finite() {
            return domain(format!("Vasicek s_r must be nonnegative, got {s_r}"));
        }
        Ok(Self {
            a1,
            a2,
            s_r,
            convention: AConvention::Standard,
        })
    }

    pub fn with_convention(mut self, convention: AConvention) -> Self {
        self.convention = convention;
        self
    }

    /// Constant zero short rate (no drift, no volatility).
    pub fn flat_zero() -> Self {
        Self {
            a1: 0.0,
            a2: 1.0,
            s_r: 0.0,
            convention: AConvention::Standard,
        }
    }

    pub fn b(&self, t: f64, maturity: f64) -> Result<f64> {
        vasicek_b(self, t, maturity)
    }
}

/// Firm value dynamics `dV = (r - b) V dt + s_V V dW2` with `d<W1, W2> = rho dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirmParams {
    pub s_v: f64,
    pub b: f64,
    pub rho: f64,
}

impl FirmParams {
    pub fn new(s_v: f64, b: f64, rho: f64) -> Result<Self> {
        if !(s_v > 0.0) || !s_v.is_finite() {
            return domain(format!("firm volatility must be positive, got {s_v}"));
        }
        if !(b >= 0.0) || !b.is_finite() {
            return domain(format!("dividend rate must be nonnegative, got {b}"));
        }
        if !(-1.0..=1.0).contains(&rho) {
            return domain(format!("correlation must lie in [-1, 1], got {rho}"));
        }
        Ok(Self { s_v, b, rho })
    }
}

fn check_order(t: f64, maturity: f64) -> Result<()> {
    if !(t <= maturity) {
        return domain(format!("time {t} is after maturity {maturity}"));
    }
    Ok(())
}

/// Unchecked `(1 - exp(-a tau)) / a` with the small `a tau` limit.
#[inline]
pub(crate) fn b_factor(a: f64, tau: f64) -> f64 {
    let x = a * tau;
    if x.abs() < 1e-8 {
        tau * (1.0 - 0.5 * x)
    } else {
        -(-x).exp_m1() / a
    }
}

/// `B(t, T) = (1 - exp(-a2 (T - t))) / a2`.
pub fn vasicek_b(params: &VasicekParams, t: f64, maturity: f64) -> Result<f64> {
    check_order(t, maturity)?;
    Ok(b_factor(params.a2, maturity - t))
}

/// `A(t, T) = -int_t^T [c B(u, T) - s_r^2 B(u, T)^2 / 2] du` with `c` chosen by
/// the convention, evaluated by adaptive quadrature.
pub fn vasicek_a(params: &VasicekParams, t: f64, maturity: f64) -> Result<f64> {
    check_order(t, maturity)?;
    if t == maturity {
        return Ok(0.0);
    }
    let drift = match params.convention {
        AConvention::Reversion => params.a2,
        AConvention::Standard => params.a1,
    };
    let a2 = params.a2;
    let s2 = params.s_r * params.s_r;
    let integrand = |u: f64| {
        let b = b_factor(a2, maturity - u);
        drift * b - 0.5 * s2 * b * b
    };
    let v = integrate(integrand, t, maturity, Tolerance::new(1e-13, 1e-14))?;
    Ok(-v)
}

/// Default free zero coupon bond `Z(r, t; T) = exp(A(t, T) - B(t, T) r)`.
pub fn zcb_price(params: &VasicekParams, r: f64, t: f64, maturity: f64) -> Result<f64> {
    let a = vasicek_a(params, t, maturity)?;
    let b = vasicek_b(params, t, maturity)?;
    Ok((a - b * r).exp())
}

/// Volatility of the firm value deflated by `Z(r, t; T)`.
pub fn effective_sigma(v: &VasicekParams, f: &FirmParams, t: f64, maturity: f64) -> Result<f64> {
    let b = vasicek_b(v, t, maturity)?;
    Ok(effective_variance_at(v, f, b).sqrt())
}

#[inline]
fn effective_variance_at(v: &VasicekParams, f: &FirmParams, b: f64) -> f64 {
    let x = f.s_v * f.s_v + 2.0 * f.rho * f.s_v * v.s_r * b + v.s_r * v.s_r * b * b;
    x.max(0.0)
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Piece {
    Constant(f64),
    Smooth {
        value: ScalarFn,
        primitive: Option<ScalarFn>,
    },
}

impl Piece {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Piece::Constant(c) => *c,
            Piece::Smooth { value, .. } => value(t),
        }
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        match self {
            Piece::Constant(c) => c * (b - a),
            Piece::Smooth { value, primitive } => {
                let len = b - a;
                if len <= 0.0 {
                    return 0.0;
                }
                // Short panels: an 8 point rule is exact to rounding for the smooth
                // curves used here and avoids cancellation between primitive values.
                if len < 0.05 {
                    return gl_fixed(|s| value(s), a, b, 8);
                }
                match primitive {
                    Some(p) => p(b) - p(a),
                    None => {
                        let f = |s: f64| value(s);
                        integrate(f, a, b, Tolerance::new(1e-15, 1e-14))
                            .unwrap_or_else(|_| gl_fixed(|s| value(s), a, b, 32))
                    }
                }
            }
        }
    }
}

/// A piecewise continuous function of time, stored as interior breakpoints
/// and one evaluator per segment so integrals can be split at discontinuities.
#[derive(Clone)]
pub struct Curve {
    knots: Vec<f64>,
    pieces: Vec<Piece>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve")
            .field("knots", &self.knots)
            .field("pieces", &self.pieces.len())
            .finish()
    }
}

impl Curve {
    pub fn constant(c: f64) -> Self {
        Self {
            knots: Vec::new(),
            pieces: vec![Piece::Constant(c)],
        }
    }

    /// Piecewise constant curve: `values[i]` holds on `(knots[i-1], knots[i])`.
    pub fn piecewise_constant(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != knots.len() + 1 {
            return domain("piecewise constant curve needs one more value than knots");
        }
        check_knots(&knots)?;
        Ok(Self {
            knots,
            pieces: values.into_iter().map(Piece::Constant).collect(),
        })
    }

    pub fn smooth(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            knots: Vec::new(),
            pieces: vec![Piece::Smooth {
                value: Arc::new(f),
                primitive: None,
            }],
        }
    }

    /// Smooth curve with a known antiderivative.
    pub fn smooth_with_primitive(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        primitive: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            knots: Vec::new(),
            pieces: vec![Piece::Smooth {
                value: Arc::new(f),
                primitive: Some(Arc::new(primitive)),
            }],
        }
    }

    /// Pointwise square; used to turn a volatility curve into a variance curve.
    pub fn squared(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| match p {
                Piece::Constant(c) => Piece::Constant(c * c),
                Piece::Smooth { value, .. } => {
                    let v = value.clone();
                    Piece::Smooth {
                        value: Arc::new(move |t| {
                            let s = v(t);
                            s * s
                        }),
                        primitive: None,
                    }
                }
            })
            .collect();
        Self {
            knots: self.knots.clone(),
            pieces,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self.pieces.as_slice() {
            [Piece::Constant(c)] => Some(*c),
            _ => None,
        }
    }

    fn piece_index(&self, t: f64) -> usize {
        // right-continuous at knots
        self.knots.partition_point(|&k| k <= t)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.pieces[self.piece_index(t)].eval(t)
    }

    /// `int_a^b curve(s) ds` for `a <= b`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        if let Some(c) = self.is_constant() {
            return c * (b - a);
        }
        let mut total = 0.0;
        let mut lo = a;
        let mut idx = self.piece_index(a);
        while lo < b {
            let hi = if idx < self.knots.len() {
                self.knots[idx].min(b)
            } else {
                b
            };
            if hi > lo {
                total += self.pieces[idx].integral(lo, hi);
            }
            lo = hi;
            idx += 1;
        }
        total
    }
}

fn check_knots(knots: &[f64]) -> Result<()> {
    if knots.iter().any(|k| !k.is_finite()) || knots.windows(2).any(|w| w[1] <= w[0]) {
        return domain("curve knots must be finite and strictly increasing");
    }
    Ok(())
}

/// Integrals of the rate, dividend and variance curves over `[t, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratedCoeffs {
    pub rate: f64,
    pub dividend: f64,
    pub variance: f64,
}

/// Short rate `r(t)`, dividend rate `q(t)` and volatility `sigma(t)` of an
/// inhomogeneous Black-Scholes problem. The volatility is stored squared.
#[derive(Debug, Clone)]
pub struct CoefficientCurves {
    pub rate: Curve,
    pub dividend: Curve,
    pub variance: Curve,
}

impl CoefficientCurves {
    pub fn constant(r: f64, q: f64, sigma: f64) -> Self {
        Self {
            rate: Curve::constant(r),
            dividend: Curve::constant(q),
            variance: Curve::constant(sigma * sigma),
        }
    }

    /// Builds the curves from a volatility curve (squared internally).
    pub fn from_vol(rate: Curve, dividend: Curve, vol: &Curve) -> Self {
        Self {
            rate,
            dividend,
            variance: vol.squared(),
        }
    }

    pub fn from_variance(rate: Curve, dividend: Curve, variance: Curve) -> Self {
        Self {
            rate,
            dividend,
            variance,
        }
    }

    pub fn sigma(&self, t: f64) -> f64 {
        self.variance.eval(t).max(0.0).sqrt()
    }

    /// All breakpoints of the three curves, sorted and deduplicated.
    pub fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self
            .rate
            .knots()
            .iter()
            .chain(self.dividend.knots())
            .chain(self.variance.knots())
            .copied()
            .collect();
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }
}

/// `(r_bar, q_bar, sigma_bar^2)` over `[t, T]`.
pub fn integrated_coeffs(c: &CoefficientCurves, t: f64, maturity: f64) -> Result<IntegratedCoeffs> {
    check_order(t, maturity)?;
    Ok(IntegratedCoeffs {
        rate: c.rate.integral(t, maturity),
        dividend: c.dividend.integral(t, maturity),
        variance: c.variance.integral(t, maturity),
    })
}

/// Sign selector for `d+` / `d-`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pm {
    Plus,
    Minus,
}

/// Standardized distance `d±(x/K, t, T)`.
pub fn d_pm(x_over_k: f64, t: f64, maturity: f64, c: &CoefficientCurves, sign: Pm) -> Result<f64> {
    if !(x_over_k > 0.0) {
        return domain(format!(
            "d± needs a positive moneyness ratio, got {x_over_k}"
        ));
    }
    let ic = integrated_coeffs(c, t, maturity)?;
    if !(ic.variance > 0.0) {
        return domain("d± needs positive integrated variance");
    }
    Ok(d_from(x_over_k.ln(), &ic, sign))
}

#[inline]
pub(crate) fn d_from(log_moneyness: f64, ic: &IntegratedCoeffs, sign: Pm) -> f64 {
    let s = ic.variance.sqrt();
    let half = 0.5 * ic.variance;
    let drift = log_moneyness + ic.rate - ic.dividend;
    match sign {
        Pm::Plus => (drift + half) / s,
        Pm::Minus => (drift - half) / s,
    }
}

// int_0^u (1 - e^{-a v}) / a dv
fn g1(a: f64, u: f64) -> f64 {
    let x = a * u;
    if x.abs() < 0.05 {
        // sum_{k>=1} (-a)^{k-1} u^{k+1} / (k+1)!
        let mut term = u * u / 2.0;
        let mut sum = term;
        for k in 2..30 {
            term *= -x / (k as f64 + 1.0);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (x + (-x).exp_m1()) / (a * a)
    }
}

// int_0^u ((1 - e^{-a v}) / a)^2 dv
fn g2(a: f64, u: f64) -> f64 {
    let x = a * u;
    if x.abs() < 0.05 {
        // (1 - e^{-x})^2 = sum_{k>=2} (-1)^k (2^k - 2) x^k / k!
        let mut sum = 0.0;
        let mut xk_over_fact = x * x / 2.0; // x^k / k! at k = 2
        for k in 2..40 {
            let kf = k as f64;
            let coef = if k % 2 == 0 { 1.0 } else { -1.0 } * (2f64.powi(k) - 2.0);
            // integrate x^k dv with x = a v: a^k u^{k+1} / (k+1); divide by a^2
            let term = coef * xk_over_fact * u / (kf + 1.0) / (a * a);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() && k > 3 {
                break;
            }
            xk_over_fact *= x / (kf + 1.0);
        }
        sum
    } else {
        (x + 2.0 * (-x).exp_m1() - 0.5 * (-2.0 * x).exp_m1()) / (a * a * a)
    }
}

/// Variance curve `sigma^2(t)` of `V / Z(r, t; T)` with an exact antiderivative.
pub fn effective_variance_curve(v: &VasicekParams, f: &FirmParams, maturity: f64) -> Curve {
    let (vv, ff) = (*v, *f);
    let a = v.a2;
    let value = move |t: f64| effective_variance_at(&vv, &ff, b_factor(a, (maturity - t).max(0.0)));
    let (sv, sr, rho) = (f.s_v, v.s_r, f.rho);
    let primitive = move |t: f64| {
        let u = (maturity - t).max(0.0);
        sv * sv * t - 2.0 * rho * sv * sr * g1(a, u) - sr * sr * g2(a, u)
    };
    Curve::smooth_with_primitive(value, primitive)
}

/// Coefficient curves of the reduced (deflated) bond problem: `r = lambda`,
/// `q = lambda + b`, `sigma` from [`effective_sigma`] against `maturity`.
pub fn reduced_curves(
    v: &VasicekParams,
    f: &FirmParams,
    lambda: f64,
    maturity: f64,
) -> CoefficientCurves {
    CoefficientCurves::from_variance(
        Curve::constant(lambda),
        Curve::constant(lambda + f.b),
        effective_variance_curve(v, f, maturity),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn b_limits() {
        let p = VasicekParams::new(0.0, 0.379, 0.077).unwrap();
        assert_eq!(vasicek_b(&p, 3.0, 3.0).unwrap(), 0.0);
        let tiny = VasicekParams::new(0.0, 1e-12, 0.0).unwrap();
        assert!((vasicek_b(&tiny, 0.0, 1.0).unwrap() - 1.0).abs() < 1e-11);
        assert!(vasicek_b(&p, 2.0, 1.0).is_err());
    }

    #[test]
    fn g_series_matches_closed_form_at_switch() {
        for &a in &[0.379, 1.0, 0.01] {
            let u = 0.05 / a;
            let lo = u * (1.0 - 1e-9);
            let hi = u * (1.0 + 1e-9);
            let slope = b_factor(a, u);
            assert!((g1(a, hi) - g1(a, lo) - slope * (hi - lo)).abs() < 1e-12 * g1(a, u));
            assert!((g2(a, hi) - g2(a, lo) - slope * slope * (hi - lo)).abs() < 1e-12 * g2(a, u));
        }
    }

    #[test]
    fn effective_variance_primitive_matches_quadrature() {
        let v = VasicekParams::new(0.02, 0.379, 0.077).unwrap();
        let f = FirmParams::new(0.15, 0.05, 0.5).unwrap();
        let curve = effective_variance_curve(&v, &f, 3.0);
        let direct = integrate(|s| curve.eval(s), 0.0, 3.0, Tolerance::new(1e-15, 1e-15)).unwrap();
        assert!((curve.integral(0.0, 3.0) - direct).abs() < 1e-13);
        assert!(
            (curve.integral(2.0, 3.0)
                - integrate(|s| curve.eval(s), 2.0, 3.0, Tolerance::new(1e-15, 1e-15)).unwrap())
            .abs()
                < 1e-14
        );
    }

    #[test]
    fn curve_is_right_continuous() {
        let c = Curve::piecewise_constant(vec![1.0], vec![0.1, 0.3]).unwrap();
        assert_eq!(c.eval(0.999), 0.1);
        assert_eq!(c.eval(1.0), 0.3);
        assert!((c.integral(0.5, 1.5) - 0.2).abs() < 1e-15);
    }
}

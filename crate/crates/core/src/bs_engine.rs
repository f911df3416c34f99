//! Value, gradient and second derivative of the inhomogeneous Black-Scholes
//! terminal value problem
//!
//! ```text
//! V_t + sigma(t)^2 x^2 V_xx / 2 + (r(t) - q(t)) x V_x - r(t) V + g(x) = 0,   V(x, T) = f(x)
//! ```
//!
//! through Gaussian kernel representations. The expectation over the standard
//! normal variate is split at the images of the payoff breakpoints, so jumps in
//! `f` and `g` never fall inside a quadrature panel; their contribution to the
//! derivatives is added in closed form from the jump tables.

use crate::error::{domain, Result};
use crate::math::normal::{self, pdf};
use crate::math::quadrature::{integrate_panels, Tolerance};
use crate::payoff::{PiecewisePayoff, Segment};
use crate::term_model::{integrated_coeffs, CoefficientCurves, IntegratedCoeffs};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Truncation radius of the Gaussian variate, in standard deviations.
    pub y_cutoff: f64,
    /// Integrated variance below which the kernel is replaced by a point mass.
    pub min_variance: f64,
    /// Integrate polynomial segments in closed form instead of by quadrature.
    pub analytic_segments: bool,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            y_cutoff: 10.0,
            min_variance: 1e-14,
            analytic_segments: true,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return domain("quadrature tolerances must be positive");
        }
        if !(self.y_cutoff >= 8.0) {
            return domain("y_cutoff must be at least 8");
        }
        if !(self.min_variance >= 0.0) {
            return domain("min_variance must be nonnegative");
        }
        Ok(())
    }

    fn tolerance(&self, order: u8) -> Tolerance {
        let loosen = 10f64.powi(order as i32);
        Tolerance::new(self.abs_tol * loosen, self.rel_tol * loosen)
    }
}

/// Terminal payoff `f`, source `g`, coefficient curves and horizon `T`.
#[derive(Debug, Clone)]
pub struct TVProblem {
    pub curves: CoefficientCurves,
    pub terminal: PiecewisePayoff,
    pub source: PiecewisePayoff,
    pub horizon: f64,
}

impl TVProblem {
    pub fn new(
        curves: CoefficientCurves,
        terminal: PiecewisePayoff,
        source: PiecewisePayoff,
        horizon: f64,
    ) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return domain(format!("horizon must be positive, got {horizon}"));
        }
        Ok(Self {
            curves,
            terminal,
            source,
            horizon,
        })
    }

    /// Problem without a source term.
    pub fn homogeneous(
        curves: CoefficientCurves,
        terminal: PiecewisePayoff,
        horizon: f64,
    ) -> Result<Self> {
        Self::new(curves, terminal, PiecewisePayoff::zero(), horizon)
    }

    fn has_source(&self) -> bool {
        match self.source.segments() {
            [Segment::Poly(c)] => !(c.len() == 1 && c[0] == 0.0),
            _ => true,
        }
    }

    fn check(&self, x: f64, t: f64) -> Result<()> {
        if !(x > 0.0) || !x.is_finite() {
            return domain(format!("x must be positive and finite, got {x}"));
        }
        if !(t >= 0.0 && t <= self.horizon) {
            return domain(format!("t = {t} lies outside [0, {}]", self.horizon));
        }
        Ok(())
    }
}

/// `c(y, t, T) = exp(-y s + r_bar - q_bar - s^2 / 2)` with `s^2 = sigma_bar^2(t, T)`.
pub fn kernel_c(y: f64, t: f64, maturity: f64, curves: &CoefficientCurves) -> Result<f64> {
    if !(t < maturity) {
        return domain("kernel_c needs t < T");
    }
    let ic = integrated_coeffs(curves, t, maturity)?;
    let s = ic.variance.sqrt();
    Ok((-y * s + ic.rate - ic.dividend - 0.5 * ic.variance).exp())
}

/// Order `j` derivative in `x` of `exp(-r_bar) E[h(x c(Y))]` for the integrated
/// coefficients `ic`: smooth part plus jump corrections.
fn kernel_derivative(
    h: &PiecewisePayoff,
    x: f64,
    ic: &IntegratedCoeffs,
    order: u8,
    cfg: &QuadratureConfig,
    tol: Tolerance,
) -> Result<f64> {
    let var = ic.variance;
    let growth = ic.rate - ic.dividend;
    if var < cfg.min_variance {
        let z = x * growth.exp();
        let segs = h.segments();
        let seg = &segs[h.breakpoints().partition_point(|&k| k <= z)];
        return Ok(match order {
            0 => (-ic.rate).exp() * seg.value(z),
            1 => (-ic.dividend).exp() * seg.d1(z)?,
            _ => (ic.rate - 2.0 * ic.dividend).exp() * seg.d2(z)?,
        });
    }
    let s = var.sqrt();
    let jf = order as f64;
    let mu0 = growth - 0.5 * var;
    let mu = mu0 + jf * var;
    let prefactor = (-ic.rate + jf * mu0 + 0.5 * jf * jf * var).exp();
    let lx = x.ln();
    let w_of = |k: f64, m: f64| (lx - k.ln() + m) / s;

    let mut smooth = 0.0;
    for (i, seg) in h.segments().iter().enumerate() {
        let (lo, hi) = h.segment_interval(i);
        // z = x exp(-w s + mu) is decreasing in w
        let beta = if lo > 0.0 {
            w_of(lo, mu)
        } else {
            f64::INFINITY
        };
        let alpha = if hi.is_finite() {
            w_of(hi, mu)
        } else {
            f64::NEG_INFINITY
        };
        smooth += match seg {
            Segment::Poly(c) if cfg.analytic_segments => {
                poly_moment(c, order, x, mu, s, alpha, beta)
            }
            _ => segment_quadrature(seg, order, x, mu, s, alpha, beta, cfg.y_cutoff, tol)?,
        };
    }
    let mut total = prefactor * smooth;

    if order >= 1 {
        let p0 = (-ic.rate).exp();
        for j in h.jumps() {
            let w0 = w_of(j.at, mu0);
            let dv = j.value_jump();
            if order == 1 {
                total += p0 * dv * pdf(w0) / (x * s);
            } else {
                let p1 = (-ic.dividend).exp();
                let w1 = w_of(j.at, mu0 + var);
                let dd = j
                    .slope_jump()
                    .ok_or(crate::Error::MissingDerivative("first"))?;
                total += p1 * dd * pdf(w1) / (x * s);
                total -= p0 * dv * pdf(w0) * (w0 + s) / (x * x * var);
            }
        }
    }
    Ok(total)
}

fn nth_derivative(c: &[f64], order: u8) -> Vec<f64> {
    let mut d = c.to_vec();
    for _ in 0..order {
        if d.len() <= 1 {
            return vec![0.0];
        }
        d = d
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, &a)| n as f64 * a)
            .collect();
    }
    d
}

/// `E[p(x exp(-W s + mu)) 1{alpha < W < beta}]` for a polynomial `p` (the
/// `order`-th derivative of `c`).
fn poly_moment(c: &[f64], order: u8, x: f64, mu: f64, s: f64, alpha: f64, beta: f64) -> f64 {
    let d = nth_derivative(c, order);
    let mut acc = 0.0;
    for (n, &a) in d.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let nf = n as f64;
        let ns = nf * s;
        let mass = normal::interval(alpha + ns, beta + ns);
        if mass == 0.0 {
            continue;
        }
        let scale = if n == 0 {
            1.0
        } else {
            (nf * (x.ln() + mu) + 0.5 * ns * ns).exp()
        };
        acc += a * scale * mass;
    }
    acc
}

#[allow(clippy::too_many_arguments)]
fn segment_quadrature(
    seg: &Segment,
    order: u8,
    x: f64,
    mu: f64,
    s: f64,
    alpha: f64,
    beta: f64,
    cutoff: f64,
    tol: Tolerance,
) -> Result<f64> {
    let a = alpha.max(-cutoff);
    let b = beta.min(cutoff);
    if !(b > a) {
        return Ok(0.0);
    }
    let panels = ((b - a) / 2.0).ceil().max(1.0) as usize;
    let knots: Vec<f64> = (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect();
    let lx = x.ln() + mu;
    let eval = |w: f64| -> Result<f64> {
        let z = (lx - w * s).exp();
        let v = match order {
            0 => seg.value(z),
            1 => seg.d1(z)?,
            _ => seg.d2(z)?,
        };
        Ok(v * pdf(w))
    };
    integrate_panels(eval, &knots, tol)
}

fn solve_order(prob: &TVProblem, x: f64, t: f64, order: u8, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    prob.check(x, t)?;
    let tol = cfg.tolerance(order);
    let big_t = prob.horizon;
    if t == big_t {
        return match order {
            0 => prob.terminal.eval(x),
            1 => prob.terminal.eval_d1(x),
            _ => prob.terminal.eval_d2(x),
        };
    }
    let ic = integrated_coeffs(&prob.curves, t, big_t)?;
    let terminal = kernel_derivative(&prob.terminal, x, &ic, order, cfg, tol)?;
    if !prob.has_source() {
        return Ok(terminal);
    }
    // tau = t + u^2 removes the 1/sqrt(tau - t) behaviour of the jump terms
    let inner_tol = Tolerance::new(tol.abs * 0.1, tol.rel * 0.1);
    let integrand = |u: f64| -> Result<f64> {
        let tau = t + u * u;
        let ict = integrated_coeffs(&prob.curves, t, tau)?;
        Ok(2.0 * u * kernel_derivative(&prob.source, x, &ict, order, cfg, inner_tol)?)
    };
    let knots = sqrt_knots(&prob.curves, t, big_t);
    let source = integrate_panels(integrand, &knots, tol)?;
    Ok(terminal + source)
}

/// Panel boundaries in `u = sqrt(tau - t)` for `tau` in `[t, T]`, split at curve knots.
fn sqrt_knots(curves: &CoefficientCurves, t: f64, big_t: f64) -> Vec<f64> {
    let mut knots = vec![0.0];
    for k in curves.knots() {
        if k > t && k < big_t {
            knots.push((k - t).sqrt());
        }
    }
    knots.push((big_t - t).sqrt());
    knots
}

/// `V(x, t)`.
pub fn solve_value(prob: &TVProblem, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    solve_order(prob, x, t, 0, cfg)
}

/// `dV/dx (x, t)` including the jump corrections of `f` and `g`.
pub fn solve_gradient(prob: &TVProblem, x: f64, t: f64, cfg: &QuadratureConfig) -> Result<f64> {
    solve_order(prob, x, t, 1, cfg)
}

/// `d^2V/dx^2 (x, t)` including value and slope jump corrections.
pub fn solve_second_derivative(
    prob: &TVProblem,
    x: f64,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    solve_order(prob, x, t, 2, cfg)
}

/// `int_t^T exp(-int_t^tau c(s) ds) dtau` for one of the coefficient curves.
fn discounted_time(curve: &crate::term_model::Curve, t: f64, big_t: f64) -> Result<f64> {
    if let Some(c) = curve.is_constant() {
        let h = big_t - t;
        let x = c * h;
        return Ok(if x.abs() < 1e-8 {
            h * (1.0 - 0.5 * x)
        } else {
            -(-x).exp_m1() / c
        });
    }
    let mut knots = vec![t];
    knots.extend(
        curve
            .knots()
            .iter()
            .copied()
            .filter(|&k| k > t && k < big_t),
    );
    knots.push(big_t);
    integrate_panels(
        |tau| Ok((-curve.integral(t, tau)).exp()),
        &knots,
        Tolerance::new(1e-14, 1e-13),
    )
}

/// `int_t^T exp(-q_bar(t, tau)) / sqrt(2 pi sigma_bar^2(t, tau)) dtau`.
fn jump_weight_time(curves: &CoefficientCurves, t: f64, big_t: f64) -> Result<f64> {
    let knots = sqrt_knots(curves, t, big_t);
    integrate_panels(
        |u| {
            let ic = integrated_coeffs(curves, t, t + u * u)?;
            if ic.variance <= 0.0 {
                return domain("zero variance on a source interval");
            }
            Ok(2.0 * u * (-ic.dividend).exp() * normal::INV_SQRT_2PI / ic.variance.sqrt())
        },
        &knots,
        Tolerance::new(1e-13, 1e-12),
    )
}

fn bounded(b: crate::payoff::BoundsSummary, what: &str) -> Result<(f64, f64)> {
    if !b.is_bounded() {
        return Err(crate::Error::Unbounded(format!("{what} is not bounded")));
    }
    Ok((b.m, b.big_m))
}

/// Min-max envelope of `V(., t)` from the bounds of `f` and `g`.
pub fn value_bounds(prob: &TVProblem, t: f64) -> Result<(f64, f64)> {
    if !(0.0..=prob.horizon).contains(&t) {
        return domain("t outside [0, T]");
    }
    let (mf, big_mf) = bounded(prob.terminal.bounds(), "terminal payoff")?;
    let (mg, big_mg) = bounded(prob.source.bounds(), "source term")?;
    let disc = (-prob.curves.rate.integral(t, prob.horizon)).exp();
    let time = discounted_time(&prob.curves.rate, t, prob.horizon)?;
    Ok((mf * disc + mg * time, big_mf * disc + big_mg * time))
}

/// Envelope of `dV/dx (., t)`, including the jump terms of both payoffs.
pub fn gradient_bounds(prob: &TVProblem, t: f64) -> Result<(f64, f64)> {
    if !(t >= 0.0 && t < prob.horizon) {
        return domain("gradient bounds need 0 <= t < T");
    }
    let (mf, big_mf) = bounded(
        prob.terminal.derivative_bounds()?,
        "terminal payoff derivative",
    )?;
    let (mg, big_mg) = bounded(prob.source.derivative_bounds()?, "source derivative")?;
    let ic = integrated_coeffs(&prob.curves, t, prob.horizon)?;
    let eq = (-ic.dividend).exp();
    let time = discounted_time(&prob.curves.dividend, t, prob.horizon)?;
    let mut lo = mf * eq + mg * time;
    let mut hi = big_mf * eq + big_mg * time;
    let f_weight = eq * normal::INV_SQRT_2PI / ic.variance.sqrt();
    for j in prob.terminal.jumps() {
        let d = j.value_jump() / j.at;
        lo += d.min(0.0) * f_weight;
        hi += d.max(0.0) * f_weight;
    }
    if prob.source.jumps().iter().any(|j| j.value_jump() != 0.0) {
        let g_weight = jump_weight_time(&prob.curves, t, prob.horizon)?;
        for j in prob.source.jumps() {
            let d = j.value_jump() / j.at;
            lo += d.min(0.0) * g_weight;
            hi += d.max(0.0) * g_weight;
        }
    }
    Ok((lo, hi))
}

/// `V(0+, t)`, `V(+inf, t)`, `dV/dx(0+, t)` and `dV/dx(+inf, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticLimits {
    pub value_at_zero: f64,
    pub value_at_infinity: f64,
    pub slope_at_zero: f64,
    pub slope_at_infinity: f64,
}

pub fn asymptotic_limits(prob: &TVProblem, t: f64) -> Result<AsymptoticLimits> {
    if !(0.0..=prob.horizon).contains(&t) {
        return domain("t outside [0, T]");
    }
    let (f, g) = (&prob.terminal, &prob.source);
    let disc = (-prob.curves.rate.integral(t, prob.horizon)).exp();
    let rate_time = discounted_time(&prob.curves.rate, t, prob.horizon)?;
    let div = (-prob.curves.dividend.integral(t, prob.horizon)).exp();
    let div_time = discounted_time(&prob.curves.dividend, t, prob.horizon)?;
    let combine = |a: f64, wa: f64, b: f64, wb: f64| {
        let mut v = 0.0;
        if a != 0.0 {
            v += a * wa;
        }
        if b != 0.0 && wb != 0.0 {
            v += b * wb;
        }
        v
    };
    Ok(AsymptoticLimits {
        value_at_zero: combine(f.value_at_zero()?, disc, g.value_at_zero()?, rate_time),
        value_at_infinity: combine(
            f.value_at_infinity()?,
            disc,
            g.value_at_infinity()?,
            rate_time,
        ),
        slope_at_zero: combine(f.slope_at_zero()?, div, g.slope_at_zero()?, div_time),
        slope_at_infinity: combine(
            f.slope_at_infinity()?,
            div,
            g.slope_at_infinity()?,
            div_time,
        ),
    })
}

/// `int_t^T exp(-r_bar(t, tau)) dtau`, the present value of a unit rate annuity.
pub fn annuity(curves: &CoefficientCurves, t: f64, big_t: f64) -> Result<f64> {
    if !(t <= big_t) {
        return domain("annuity needs t <= T");
    }
    discounted_time(&curves.rate, t, big_t)
}

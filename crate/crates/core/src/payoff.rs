//! Piecewise differentiable payoffs with registered breakpoints and jump tables.
//!
//! Segments are right-continuous at breakpoints: `eval(k)` returns the limit
//! from the right. Integrals against a continuous kernel do not see the
//! convention since breakpoints have measure zero.

use crate::error::{domain, Error, Result};
use std::fmt;
use std::sync::Arc;

/// A segment evaluator backed by arbitrary code (for example an interpolation table).
pub trait SegmentFn: Send + Sync {
    fn value(&self, x: f64) -> f64;

    fn d1(&self, _x: f64) -> Option<f64> {
        None
    }

    fn d2(&self, _x: f64) -> Option<f64> {
        None
    }

    /// `lim_{x -> 0+}` of the value, when the segment starts at zero.
    fn value_at_zero(&self) -> Option<f64> {
        None
    }

    fn value_at_infinity(&self) -> Option<f64> {
        None
    }

    fn slope_at_zero(&self) -> Option<f64> {
        None
    }

    fn slope_at_infinity(&self) -> Option<f64> {
        None
    }
}

/// One piece of a [`PiecewisePayoff`].
#[derive(Clone)]
pub enum Segment {
    /// Polynomial `sum_n c[n] x^n`; expectations against the lognormal kernel are analytic.
    Poly(Vec<f64>),
    Custom(Arc<dyn SegmentFn>),
}

impl fmt::Debug for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Poly(c) => f.debug_tuple("Poly").field(c).finish(),
            Segment::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

fn trim(mut c: Vec<f64>) -> Vec<f64> {
    while c.len() > 1 && c[c.len() - 1] == 0.0 {
        c.pop();
    }
    if c.is_empty() {
        c.push(0.0);
    }
    c
}

pub(crate) fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn poly_derivative(c: &[f64]) -> Vec<f64> {
    if c.len() <= 1 {
        return vec![0.0];
    }
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(n, &a)| n as f64 * a)
        .collect()
}

impl Segment {
    pub fn poly(coeffs: Vec<f64>) -> Self {
        Segment::Poly(trim(coeffs))
    }

    pub fn custom(f: impl SegmentFn + 'static) -> Self {
        Segment::Custom(Arc::new(f))
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Segment::Poly(c) => poly_eval(c, x),
            Segment::Custom(f) => f.value(x),
        }
    }

    pub fn d1(&self, x: f64) -> Result<f64> {
        match self {
            Segment::Poly(c) => Ok(poly_eval(&poly_derivative(c), x)),
            Segment::Custom(f) => f.d1(x).ok_or(Error::MissingDerivative("first")),
        }
    }

    pub fn d2(&self, x: f64) -> Result<f64> {
        match self {
            Segment::Poly(c) => Ok(poly_eval(&poly_derivative(&poly_derivative(c)), x)),
            Segment::Custom(f) => f.d2(x).ok_or(Error::MissingDerivative("second")),
        }
    }

    fn scaled(&self, k: f64) -> Segment {
        match self {
            Segment::Poly(c) => Segment::poly(c.iter().map(|a| a * k).collect()),
            Segment::Custom(f) => Segment::Custom(Arc::new(Scaled(f.clone(), k))),
        }
    }

    fn plus(&self, other: &Segment) -> Segment {
        match (self, other) {
            (Segment::Poly(a), Segment::Poly(b)) => {
                let n = a.len().max(b.len());
                let c = (0..n)
                    .map(|i| a.get(i).copied().unwrap_or(0.0) + b.get(i).copied().unwrap_or(0.0))
                    .collect();
                Segment::poly(c)
            }
            _ => Segment::Custom(Arc::new(Sum(self.as_fn(), other.as_fn()))),
        }
    }

    fn as_fn(&self) -> Arc<dyn SegmentFn> {
        match self {
            Segment::Poly(c) => Arc::new(PolyFn(c.clone())),
            Segment::Custom(f) => f.clone(),
        }
    }

    fn value_at_zero(&self) -> Option<f64> {
        match self {
            Segment::Poly(c) => Some(c[0]),
            Segment::Custom(f) => f.value_at_zero(),
        }
    }

    fn slope_at_zero(&self) -> Option<f64> {
        match self {
            Segment::Poly(c) => Some(c.get(1).copied().unwrap_or(0.0)),
            Segment::Custom(f) => f.slope_at_zero(),
        }
    }

    fn value_at_infinity(&self) -> Option<f64> {
        match self {
            Segment::Poly(c) if c.len() == 1 => Some(c[0]),
            Segment::Poly(c) => Some(f64::INFINITY.copysign(c[c.len() - 1])),
            Segment::Custom(f) => f.value_at_infinity(),
        }
    }

    fn slope_at_infinity(&self) -> Option<f64> {
        match self {
            Segment::Poly(c) if c.len() <= 2 => Some(c.get(1).copied().unwrap_or(0.0)),
            Segment::Poly(c) => Some(f64::INFINITY.copysign(c[c.len() - 1])),
            Segment::Custom(f) => f.slope_at_infinity(),
        }
    }
}

struct PolyFn(Vec<f64>);

impl SegmentFn for PolyFn {
    fn value(&self, x: f64) -> f64 {
        poly_eval(&self.0, x)
    }
    fn d1(&self, x: f64) -> Option<f64> {
        Some(poly_eval(&poly_derivative(&self.0), x))
    }
    fn d2(&self, x: f64) -> Option<f64> {
        Some(poly_eval(&poly_derivative(&poly_derivative(&self.0)), x))
    }
    fn value_at_zero(&self) -> Option<f64> {
        Segment::Poly(self.0.clone()).value_at_zero()
    }
    fn value_at_infinity(&self) -> Option<f64> {
        Segment::Poly(self.0.clone()).value_at_infinity()
    }
    fn slope_at_zero(&self) -> Option<f64> {
        Segment::Poly(self.0.clone()).slope_at_zero()
    }
    fn slope_at_infinity(&self) -> Option<f64> {
        Segment::Poly(self.0.clone()).slope_at_infinity()
    }
}

struct Scaled(Arc<dyn SegmentFn>, f64);

impl SegmentFn for Scaled {
    fn value(&self, x: f64) -> f64 {
        self.1 * self.0.value(x)
    }
    fn d1(&self, x: f64) -> Option<f64> {
        self.0.d1(x).map(|v| self.1 * v)
    }
    fn d2(&self, x: f64) -> Option<f64> {
        self.0.d2(x).map(|v| self.1 * v)
    }
    fn value_at_zero(&self) -> Option<f64> {
        self.0.value_at_zero().map(|v| self.1 * v)
    }
    fn value_at_infinity(&self) -> Option<f64> {
        self.0.value_at_infinity().map(|v| self.1 * v)
    }
    fn slope_at_zero(&self) -> Option<f64> {
        self.0.slope_at_zero().map(|v| self.1 * v)
    }
    fn slope_at_infinity(&self) -> Option<f64> {
        self.0.slope_at_infinity().map(|v| self.1 * v)
    }
}

struct Sum(Arc<dyn SegmentFn>, Arc<dyn SegmentFn>);

fn add_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    Some(a? + b?)
}

impl SegmentFn for Sum {
    fn value(&self, x: f64) -> f64 {
        self.0.value(x) + self.1.value(x)
    }
    fn d1(&self, x: f64) -> Option<f64> {
        add_opt(self.0.d1(x), self.1.d1(x))
    }
    fn d2(&self, x: f64) -> Option<f64> {
        add_opt(self.0.d2(x), self.1.d2(x))
    }
    fn value_at_zero(&self) -> Option<f64> {
        add_opt(self.0.value_at_zero(), self.1.value_at_zero())
    }
    fn value_at_infinity(&self) -> Option<f64> {
        add_opt(self.0.value_at_infinity(), self.1.value_at_infinity())
    }
    fn slope_at_zero(&self) -> Option<f64> {
        add_opt(self.0.slope_at_zero(), self.1.slope_at_zero())
    }
    fn slope_at_infinity(&self) -> Option<f64> {
        add_opt(self.0.slope_at_infinity(), self.1.slope_at_infinity())
    }
}

/// Left and right limits of a payoff and its derivative at one breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub at: f64,
    pub value_left: f64,
    pub value_right: f64,
    pub slope_left: Option<f64>,
    pub slope_right: Option<f64>,
}

impl JumpRecord {
    pub fn value_jump(&self) -> f64 {
        self.value_right - self.value_left
    }

    pub fn slope_jump(&self) -> Option<f64> {
        Some(self.slope_right? - self.slope_left?)
    }
}

/// Declared growth bound `|f(x)| <= a * x^(alpha * ln x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthCertificate {
    pub a: f64,
    pub alpha: f64,
}

/// Infimum and supremum of a function over `(0, inf)`, with flags telling
/// whether `{f > m}` and `{f < M}` have positive measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsSummary {
    pub m: f64,
    pub big_m: f64,
    pub strict_above_inf: bool,
    pub strict_below_sup: bool,
}

impl BoundsSummary {
    pub fn is_bounded(&self) -> bool {
        self.m.is_finite() && self.big_m.is_finite()
    }
}

#[derive(Clone, Debug)]
pub struct PiecewisePayoff {
    breakpoints: Vec<f64>,
    segments: Vec<Segment>,
    jumps: Vec<JumpRecord>,
    growth: GrowthCertificate,
}

impl PiecewisePayoff {
    /// `segments[i]` applies on `(breakpoints[i-1], breakpoints[i])`, with
    /// `breakpoints[-1] = 0` and `breakpoints[n] = inf`.
    pub fn new(
        breakpoints: Vec<f64>,
        segments: Vec<Segment>,
        growth: GrowthCertificate,
    ) -> Result<Self> {
        if segments.len() != breakpoints.len() + 1 {
            return domain("a payoff needs exactly one more segment than breakpoints");
        }
        if breakpoints.iter().any(|&k| !(k > 0.0) || !k.is_finite())
            || breakpoints.windows(2).any(|w| w[1] <= w[0])
        {
            return domain("breakpoints must be positive, finite and strictly increasing");
        }
        if !(growth.a >= 0.0) || !(growth.alpha >= 0.0) {
            return domain("growth certificate constants must be nonnegative");
        }
        let jumps = breakpoints
            .iter()
            .enumerate()
            .map(|(i, &k)| JumpRecord {
                at: k,
                value_left: segments[i].value(k),
                value_right: segments[i + 1].value(k),
                slope_left: segments[i].d1(k).ok(),
                slope_right: segments[i + 1].d1(k).ok(),
            })
            .collect();
        Ok(Self {
            breakpoints,
            segments,
            jumps,
            growth,
        })
    }

    /// Polynomial pieces with a growth certificate derived from the coefficients.
    pub fn from_polys(breakpoints: Vec<f64>, coeffs: Vec<Vec<f64>>) -> Result<Self> {
        let segments: Vec<Segment> = coeffs.into_iter().map(Segment::poly).collect();
        let growth = poly_growth(&segments);
        Self::new(breakpoints, segments, growth)
    }

    pub fn constant(c: f64) -> Self {
        Self::from_polys(vec![], vec![vec![c]]).expect("constant payoff")
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Self::from_polys(vec![], vec![coeffs]).expect("polynomial payoff")
    }

    /// `1{x > k}` (right-continuous, so `eval(k) = 1`).
    pub fn digital(k: f64) -> Result<Self> {
        Self::from_polys(vec![k], vec![vec![0.0], vec![1.0]])
    }

    /// `(x - k)^+`.
    pub fn call(k: f64) -> Result<Self> {
        Self::from_polys(vec![k], vec![vec![0.0], vec![-k, 1.0]])
    }

    /// `(k - x)^+`.
    pub fn put(k: f64) -> Result<Self> {
        Self::from_polys(vec![k], vec![vec![k, -1.0], vec![0.0]])
    }

    /// `lambda * min(cap, delta * x)`; the zero payoff when `delta = 0`.
    pub fn min_with_cap(lambda: f64, delta: f64, cap: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !(cap > 0.0) || !(0.0..=1.0).contains(&delta) {
            return domain("min_with_cap needs lambda >= 0, cap > 0 and delta in [0, 1]");
        }
        if delta == 0.0 || lambda == 0.0 {
            return Ok(Self::zero());
        }
        Self::from_polys(
            vec![cap / delta],
            vec![vec![0.0, lambda * delta], vec![lambda * cap]],
        )
    }

    /// `c_bar * 1{x > k} + delta * x * 1{x <= k}`: the deflated payoff at maturity.
    pub fn bond_terminal(c_bar: f64, k: f64, delta: f64) -> Result<Self> {
        if k == 0.0 {
            return Ok(Self::constant(c_bar));
        }
        Self::from_polys(vec![k], vec![vec![0.0, delta], vec![c_bar]])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn jumps(&self) -> &[JumpRecord] {
        &self.jumps
    }

    pub fn growth(&self) -> GrowthCertificate {
        self.growth
    }

    /// `(lo, hi)` of segment `i`, with `lo = 0` for the first and `hi = inf` for the last.
    pub fn segment_interval(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { 0.0 } else { self.breakpoints[i - 1] };
        let hi = self.breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
        (lo, hi)
    }

    fn segment_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&k| k <= x)
    }

    fn check_x(x: f64) -> Result<()> {
        if !(x > 0.0) || x.is_nan() {
            return domain(format!("payoff argument must be positive, got {x}"));
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        Ok(self.segments[self.segment_index(x)].value(x))
    }

    pub fn eval_d1(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        self.segments[self.segment_index(x)].d1(x)
    }

    pub fn eval_d2(&self, x: f64) -> Result<f64> {
        Self::check_x(x)?;
        self.segments[self.segment_index(x)].d2(x)
    }

    /// `(delta f, delta f')` at a registered breakpoint.
    pub fn jump(&self, k: f64) -> Result<(f64, f64)> {
        let rec = self
            .jumps
            .iter()
            .find(|j| (j.at - k).abs() <= 1e-12 * k.abs())
            .ok_or(Error::UnknownBreakpoint(k))?;
        let dd = rec.slope_jump().ok_or(Error::MissingDerivative("first"))?;
        Ok((rec.value_jump(), dd))
    }

    pub fn value_at_zero(&self) -> Result<f64> {
        self.segments[0]
            .value_at_zero()
            .ok_or_else(|| Error::MissingLimit("value at 0+".into()))
    }

    pub fn value_at_infinity(&self) -> Result<f64> {
        self.segments[self.segments.len() - 1]
            .value_at_infinity()
            .ok_or_else(|| Error::MissingLimit("value at +inf".into()))
    }

    pub fn slope_at_zero(&self) -> Result<f64> {
        self.segments[0]
            .slope_at_zero()
            .ok_or_else(|| Error::MissingLimit("slope at 0+".into()))
    }

    pub fn slope_at_infinity(&self) -> Result<f64> {
        self.segments[self.segments.len() - 1]
            .slope_at_infinity()
            .ok_or_else(|| Error::MissingLimit("slope at +inf".into()))
    }

    /// Pointwise sum; breakpoints are merged.
    pub fn sum(&self, other: &PiecewisePayoff) -> Result<Self> {
        let mut bps: Vec<f64> = self
            .breakpoints
            .iter()
            .chain(&other.breakpoints)
            .copied()
            .collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let mut segments = Vec::with_capacity(bps.len() + 1);
        for i in 0..=bps.len() {
            let lo = if i == 0 { 0.0 } else { bps[i - 1] };
            let hi = bps.get(i).copied().unwrap_or(f64::INFINITY);
            let probe = if hi.is_finite() {
                0.5 * (lo + hi)
            } else {
                lo + 1.0
            };
            let a = &self.segments[self.segment_index(probe)];
            let b = &other.segments[other.segment_index(probe)];
            segments.push(a.plus(b));
        }
        let growth = GrowthCertificate {
            a: self.growth.a + other.growth.a,
            alpha: self.growth.alpha.max(other.growth.alpha),
        };
        Self::new(bps, segments, growth)
    }

    /// Multiplication by a positive constant.
    pub fn scale(&self, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return domain(format!("payoff scale must be positive, got {k}"));
        }
        let segments = self.segments.iter().map(|s| s.scaled(k)).collect();
        let growth = GrowthCertificate {
            a: self.growth.a * k,
            alpha: self.growth.alpha,
        };
        Self::new(self.breakpoints.clone(), segments, growth)
    }

    /// Infimum and supremum of the payoff. Polynomial segments are bounded
    /// exactly; custom segments are sampled densely. Unbounded payoffs yield
    /// infinite entries.
    pub fn bounds(&self) -> BoundsSummary {
        let mut parts = Vec::with_capacity(self.segments.len());
        for (i, seg) in self.segments.iter().enumerate() {
            let (lo, hi) = self.segment_interval(i);
            parts.push(match seg {
                Segment::Poly(c) => poly_range(c, lo, hi),
                Segment::Custom(f) => sampled_range(
                    |x| f.value(x),
                    lo,
                    hi,
                    f.value_at_zero(),
                    f.value_at_infinity(),
                ),
            });
        }
        combine(&parts)
    }

    /// Bounds of the derivative over the open segments (jumps excluded).
    pub fn derivative_bounds(&self) -> Result<BoundsSummary> {
        let mut parts = Vec::with_capacity(self.segments.len());
        for (i, seg) in self.segments.iter().enumerate() {
            let (lo, hi) = self.segment_interval(i);
            parts.push(match seg {
                Segment::Poly(c) => poly_range(&poly_derivative(c), lo, hi),
                Segment::Custom(f) => {
                    f.d1(lo.max(1e-300))
                        .ok_or(Error::MissingDerivative("first"))?;
                    sampled_range(
                        |x| f.d1(x).unwrap_or(f64::NAN),
                        lo,
                        hi,
                        f.slope_at_zero(),
                        f.slope_at_infinity(),
                    )
                }
            });
        }
        Ok(combine(&parts))
    }
}

fn poly_growth(segments: &[Segment]) -> GrowthCertificate {
    let mut a: f64 = 0.0;
    let mut deg = 0usize;
    for s in segments {
        if let Segment::Poly(c) = s {
            a = a.max(c.iter().map(|v| v.abs()).sum());
            deg = deg.max(c.len() - 1);
        }
    }
    if deg == 0 {
        GrowthCertificate { a, alpha: 0.0 }
    } else {
        // x^n <= exp(n^2 / 4) * x^(ln x) for every x > 0
        let n = deg as f64;
        GrowthCertificate {
            a: a * (n * n / 4.0).exp(),
            alpha: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Range {
    inf: f64,
    sup: f64,
    constant: bool,
}

fn combine(parts: &[Range]) -> BoundsSummary {
    let m = parts.iter().map(|p| p.inf).fold(f64::INFINITY, f64::min);
    let big_m = parts
        .iter()
        .map(|p| p.sup)
        .fold(f64::NEG_INFINITY, f64::max);
    let strict_above_inf = parts.iter().any(|p| !(p.constant && p.inf == m));
    let strict_below_sup = parts.iter().any(|p| !(p.constant && p.sup == big_m));
    BoundsSummary {
        m,
        big_m,
        strict_above_inf,
        strict_below_sup,
    }
}

fn poly_range(c: &[f64], lo: f64, hi: f64) -> Range {
    if c.len() == 1 {
        return Range {
            inf: c[0],
            sup: c[0],
            constant: true,
        };
    }
    let mut vals = vec![poly_eval(c, lo)];
    if hi.is_finite() {
        vals.push(poly_eval(c, hi));
    } else {
        vals.push(f64::INFINITY.copysign(c[c.len() - 1]));
    }
    for x in critical_points(c, lo, hi) {
        vals.push(poly_eval(c, x));
    }
    Range {
        inf: vals.iter().copied().fold(f64::INFINITY, f64::min),
        sup: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        constant: false,
    }
}

/// Interior zeros of the derivative of `c` in `(lo, hi)`.
fn critical_points(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let d = trim(poly_derivative(c));
    let inside = |x: &f64| *x > lo && *x < hi;
    match d.len() {
        1 => vec![],
        2 => [-d[0] / d[1]].into_iter().filter(inside).collect(),
        3 => {
            let (a, b, cc) = (d[2], d[1], d[0]);
            let disc = b * b - 4.0 * a * cc;
            if disc < 0.0 {
                return vec![];
            }
            let q = -0.5 * (b + disc.sqrt().copysign(b));
            let mut r = vec![q / a];
            if q != 0.0 {
                r.push(cc / q);
            }
            r.into_iter().filter(inside).collect()
        }
        _ => {
            // Higher degree: sign scan of the derivative then bisection.
            let top = if hi.is_finite() {
                hi
            } else {
                lo.max(1.0) * 1e4
            };
            let n = 2000;
            let mut out = Vec::new();
            let mut prev_x = lo;
            let mut prev = poly_eval(&d, lo);
            for i in 1..=n {
                let x = lo + (top - lo) * i as f64 / n as f64;
                let v = poly_eval(&d, x);
                if prev.signum() != v.signum() {
                    let (mut a, mut b) = (prev_x, x);
                    for _ in 0..100 {
                        let m = 0.5 * (a + b);
                        if poly_eval(&d, m).signum() == prev.signum() {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    out.push(0.5 * (a + b));
                }
                prev_x = x;
                prev = v;
            }
            out.into_iter().filter(inside).collect()
        }
    }
}

fn sampled_range(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    at_zero: Option<f64>,
    at_inf: Option<f64>,
) -> Range {
    let mut vals = Vec::with_capacity(2100);
    let a = if lo > 0.0 { lo } else { 1e-8 };
    let b = if hi.is_finite() { hi } else { a.max(1.0) * 1e6 };
    let n = 2000;
    let (la, lb) = (a.ln(), b.ln());
    for i in 0..=n {
        let x = (la + (lb - la) * i as f64 / n as f64).exp();
        vals.push(f(x));
    }
    if lo == 0.0 {
        if let Some(v) = at_zero {
            vals.push(v);
        }
    }
    if !hi.is_finite() {
        if let Some(v) = at_inf {
            vals.push(v);
        }
    }
    let vals: Vec<f64> = vals.into_iter().filter(|v| !v.is_nan()).collect();
    let inf = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let sup = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Range {
        inf,
        sup,
        constant: sup - inf <= 1e-15 * inf.abs().max(sup.abs()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digital_is_right_continuous() {
        let d = PiecewisePayoff::digital(1.5).unwrap();
        assert_eq!(d.eval(1.5).unwrap(), 1.0);
        assert_eq!(d.eval(1.4999).unwrap(), 0.0);
        assert_eq!(d.jump(1.5).unwrap(), (1.0, 0.0));
        assert!(d.eval(0.0).is_err());
    }

    #[test]
    fn terminal_bond_payoff_jump() {
        let p = PiecewisePayoff::bond_terminal(1.3, 1.3, 0.8).unwrap();
        let (dv, dd) = p.jump(1.3).unwrap();
        assert!((dv - 0.2 * 1.3).abs() < 1e-15);
        assert_eq!(dd, -0.8);
        let b = p.bounds();
        assert_eq!((b.m, b.big_m), (0.0, 1.3));
    }

    #[test]
    fn cubic_bounds_use_critical_points() {
        // x^3 - 3x on (0, 2): min -2 at x = 1, sup 2 at x = 2
        let p = PiecewisePayoff::from_polys(vec![2.0], vec![vec![0.0, -3.0, 0.0, 1.0], vec![2.0]])
            .unwrap();
        let b = p.bounds();
        assert!((b.m + 2.0).abs() < 1e-14);
        assert!((b.big_m - 2.0).abs() < 1e-14);
    }

    #[test]
    fn sum_of_poly_stays_poly() {
        let a = PiecewisePayoff::call(1.0).unwrap();
        let b = PiecewisePayoff::put(2.0).unwrap();
        let s = a.sum(&b).unwrap();
        assert_eq!(s.breakpoints(), &[1.0, 2.0]);
        assert!(s.segments().iter().all(|s| matches!(s, Segment::Poly(_))));
        assert!((s.eval(1.5).unwrap() - 1.0).abs() < 1e-15);
    }
}

//! Default barrier root finding and uniqueness diagnostics.

use super::recursion::RecursiveSolution;
use super::{BondConfig, BondTermSheet};
use crate::error::{Error, Result};
use crate::math::normal::INV_SQRT_2PI;
use crate::math::roots::brent;
use crate::term_model::{b_factor, effective_variance_curve};

/// Record of how a barrier was located.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierEvidence {
    pub date_index: usize,
    pub date: f64,
    pub c_bar: f64,
    pub barrier: f64,
    /// Search interval `[0, M_u + c_bar + 1]`.
    pub bracket: (f64, f64),
    pub scan_points: usize,
    /// Sign changes of `x - u(x) - c_bar` seen by the log scan.
    pub sign_changes: usize,
    /// `|K - u(K) - c_bar|` with `u` from the direct solver.
    pub residual: f64,
    /// Whether the volatility sufficient condition held at this date, when it was checked.
    pub sufficient_condition: Option<bool>,
}

/// Root of `x = u(x) + c_bar` on `[0, upper + c_bar + 1]`.
///
/// `scan` is a cheap approximation of `u` used for the sign scan and `refine`
/// the accurate evaluation used by the bracketing refinement. Both must vanish
/// at `0+`. More than one sign change is reported as [`Error::MultipleRoots`].
#[allow(clippy::too_many_arguments)]
pub fn find_barrier<S, R>(
    scan: S,
    mut refine: R,
    upper: f64,
    c_bar: f64,
    date_index: usize,
    date: f64,
    scan_points: usize,
) -> Result<(f64, BarrierEvidence)>
where
    S: Fn(f64) -> Result<f64>,
    R: FnMut(f64) -> Result<f64>,
{
    if !(c_bar >= 0.0) || !c_bar.is_finite() {
        return Err(Error::Domain(format!(
            "c_bar must be nonnegative, got {c_bar}"
        )));
    }
    if !upper.is_finite() || scan_points < 2 {
        return Err(Error::Domain(
            "barrier search needs a finite bound and at least two scan points".into(),
        ));
    }
    let hi = upper.max(0.0) + c_bar + 1.0;
    let mut evidence = BarrierEvidence {
        date_index,
        date,
        c_bar,
        barrier: 0.0,
        bracket: (0.0, hi),
        scan_points,
        sign_changes: 0,
        residual: 0.0,
        sufficient_condition: None,
    };
    if c_bar == 0.0 {
        return Ok((0.0, evidence));
    }

    let lo = 1e-6 * hi;
    let ratio = (hi / lo).ln() / (scan_points - 1) as f64;
    let xs: Vec<f64> = (0..scan_points)
        .map(|j| lo * (ratio * j as f64).exp())
        .collect();
    let mut hs = Vec::with_capacity(scan_points);
    for &x in &xs {
        hs.push(x - scan(x)? - c_bar);
    }
    // h(0+) = -c_bar < 0
    let mut brackets = Vec::new();
    let mut prev = (0.0, -c_bar);
    for (&x, &h) in xs.iter().zip(&hs) {
        if h == 0.0 {
            continue;
        }
        if h.signum() != prev.1.signum() {
            brackets.push((prev.0, x));
        }
        prev = (x, h);
    }
    evidence.sign_changes = brackets.len();

    let scale = hi.max(1.0);
    let mut h_exact = |x: f64| -> Result<f64> {
        if x <= 0.0 {
            Ok(-c_bar)
        } else {
            Ok(x - refine(x)? - c_bar)
        }
    };
    let mut roots = Vec::with_capacity(brackets.len());
    for &(a, b) in &brackets {
        let root = refine_root(&mut h_exact, a, b, &xs, 1e-12 * scale)?;
        roots.push(root);
    }
    match roots.len() {
        0 => Err(Error::NoRoot {
            date_index,
            bracket: hi,
        }),
        1 => {
            let k = roots[0];
            evidence.barrier = k;
            evidence.residual = h_exact(k)?.abs();
            Ok((k, evidence))
        }
        _ => Err(Error::MultipleRoots {
            date_index,
            date,
            roots,
        }),
    }
}

/// Brent on `[a, b]`, widened to neighbouring scan points when the accurate
/// function does not change sign on the scan bracket.
fn refine_root<H>(h: &mut H, a: f64, b: f64, xs: &[f64], xtol: f64) -> Result<f64>
where
    H: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (a, b);
    for _ in 0..8 {
        let (ha, hb) = (h(a)?, h(b)?);
        if ha == 0.0 {
            return Ok(a);
        }
        if hb == 0.0 {
            return Ok(b);
        }
        if ha.signum() != hb.signum() {
            return brent(&mut *h, a, b, xtol, 200);
        }
        let ia = xs.partition_point(|&x| x < a);
        a = if ia == 0 { 0.0 } else { xs[ia - 1] };
        let ib = xs.partition_point(|&x| x <= b);
        b = if ib < xs.len() { xs[ib] } else { b * 1.5 };
    }
    Err(Error::Domain(format!(
        "barrier root could not be bracketed near [{a}, {b}]"
    )))
}

/// Per coupon date diagnostics of barrier uniqueness.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessReport {
    pub date_index: usize,
    pub date: f64,
    /// `d_k` of the sequence used for the volatility condition.
    pub d: f64,
    /// Lower bound that `d_k` has to reach.
    pub required: f64,
    pub sufficient_ok: bool,
    /// Outcome of the slope-one test; `None` when `u` at this date could not be computed.
    pub empirical_unique: Option<bool>,
    /// Points where `du/dx = 1`.
    pub s_points: Vec<f64>,
}

/// Largest `d_k` the slope bound forces at date `k`, given `d_{k+1}`.
fn required_level(sheet: &BondTermSheet, k: usize, d_next: f64) -> f64 {
    let lambda = sheet.intensity;
    let delta = sheet.recovery;
    let drift = lambda + sheet.firm.b;
    let dt = sheet.date(k + 1) - sheet.date(k);
    let e = (-drift * dt).exp();
    let var = effective_variance_curve(&sheet.rates, &sheet.firm, sheet.maturity())
        .integral(sheet.date(k), sheet.date(k + 1));
    let jump = if var > 0.0 {
        (1.0 - delta) * e * INV_SQRT_2PI / var.sqrt()
    } else if delta < 1.0 {
        f64::INFINITY
    } else {
        0.0
    };
    d_next * e + lambda * delta * b_factor(drift, dt) + jump
}

/// Greedy decreasing sequence `d_N = delta < d_{N-1} < ... < d_1` meeting the
/// slope bound at every date; the condition holds when `d_1 < 1`.
pub fn greedy_sequence(sheet: &BondTermSheet) -> Vec<f64> {
    let n = sheet.n();
    let mut d = vec![0.0; n + 1];
    d[n] = sheet.recovery;
    for k in (1..n).rev() {
        d[k] = required_level(sheet, k, d[k + 1]).max(d[k + 1].next_up());
    }
    d
}

/// Sufficient volatility condition and empirical slope-one test per coupon date
/// `1..N-1`. `sequence`, when given, is `d_1..d_N`.
pub fn check_uniqueness_conditions(
    sheet: &BondTermSheet,
    cfg: &BondConfig,
    sequence: Option<&[f64]>,
) -> Result<Vec<UniquenessReport>> {
    sheet.validate()?;
    let n = sheet.n();
    let d = match sequence {
        Some(s) => {
            if s.len() != n {
                return Err(Error::Validation(format!(
                    "expected {n} sequence values d_1..d_N"
                )));
            }
            let mut d = vec![0.0];
            d.extend_from_slice(s);
            d
        }
        None => greedy_sequence(sheet),
    };
    let delta_one = sheet.recovery == 1.0;
    let sequence_ok = (d[n] - sheet.recovery).abs() <= 1e-15
        && (1..n).all(|k| d[k] > d[k + 1])
        && (n < 2 || d[1] < 1.0);

    let partial = RecursiveSolution::build_partial(sheet, cfg)?;
    let mut reports = Vec::with_capacity(n.saturating_sub(1));
    for k in 1..n {
        let required = required_level(sheet, k, d[k + 1]);
        let sufficient_ok = delta_one || (sequence_ok && d[k] >= required && d[k] < 1.0);
        let (empirical_unique, s_points) = match partial.table(k) {
            Some(table) => {
                let c_bar = sheet.c_bar(k);
                let s = slope_one_points(table);
                let below = s.iter().all(|&x| table.value(x) + c_bar < x);
                let above = s.iter().all(|&x| table.value(x) + c_bar > x);
                (Some(c_bar == 0.0 || below || above), s)
            }
            None if partial.failed_date() == Some(k) => (Some(false), Vec::new()),
            None => (None, Vec::new()),
        };
        reports.push(UniquenessReport {
            date_index: k,
            date: sheet.date(k),
            d: d[k],
            required,
            sufficient_ok,
            empirical_unique,
            s_points,
        });
    }
    Ok(reports)
}

/// Roots of `u'(x) = 1` on the table grid, refined by bisection.
fn slope_one_points(table: &super::DeflatedValueFn) -> Vec<f64> {
    let n = table.len();
    let (lo, hi) = (table.x_min(), table.x_max());
    let step = (hi / lo).ln() / (4 * (n - 1)) as f64;
    let g = |x: f64| table.eval_all(x).1 - 1.0;
    let mut out = Vec::new();
    let mut xa = lo;
    let mut ga = g(xa);
    for j in 1..=4 * (n - 1) {
        let xb = lo * (step * j as f64).exp();
        let gb = g(xb);
        if ga == 0.0 {
            out.push(xa);
        } else if ga.signum() != gb.signum() && gb != 0.0 {
            let (mut a, mut b, mut fa) = (xa, xb, ga);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                let fm = g(m);
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            out.push(0.5 * (a + b));
        }
        xa = xb;
        ga = gb;
    }
    out
}

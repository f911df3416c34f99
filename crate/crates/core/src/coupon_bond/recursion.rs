//! Backward recursion over coupon dates with numerically tabulated value functions.

use std::sync::Arc;

use super::barrier::{find_barrier, greedy_sequence, BarrierEvidence};
use super::table::{DeflatedValueFn, ShiftedTable};
use super::{reduced_problem, BarrierSet, BondConfig, BondTermSheet};
use crate::bs_engine::{
    solve_gradient, solve_second_derivative, solve_value, value_bounds, TVProblem,
};
use crate::error::{Error, Result};
use crate::payoff::{GrowthCertificate, PiecewisePayoff, Segment};

/// Deflated value functions `u_i` on every coupon interval, the tables of
/// `u_i(., T_i)` and the barriers found from them.
#[derive(Debug, Clone)]
pub struct RecursiveSolution {
    sheet: BondTermSheet,
    cfg: BondConfig,
    problems: Vec<Option<TVProblem>>,
    tables: Vec<Option<Arc<DeflatedValueFn>>>,
    barriers: Vec<Option<f64>>,
    evidence: Vec<BarrierEvidence>,
    failure: Option<(usize, Error)>,
}

impl RecursiveSolution {
    /// Runs the full recursion down to the first coupon interval.
    pub fn build(sheet: &BondTermSheet, cfg: &BondConfig) -> Result<Self> {
        Self::run(sheet, cfg, 0, false)
    }

    /// Runs the recursion down to interval `stop` only.
    pub fn build_from(sheet: &BondTermSheet, cfg: &BondConfig, stop: usize) -> Result<Self> {
        if stop >= sheet.n() {
            return Err(Error::Domain(format!("interval index {stop} out of range")));
        }
        Self::run(sheet, cfg, stop, false)
    }

    /// Like [`build`](Self::build), but keeps whatever was computed before a
    /// barrier failure and records the failing date.
    pub fn build_partial(sheet: &BondTermSheet, cfg: &BondConfig) -> Result<Self> {
        Self::run(sheet, cfg, 0, true)
    }

    fn run(sheet: &BondTermSheet, cfg: &BondConfig, stop: usize, tolerant: bool) -> Result<Self> {
        sheet.validate()?;
        cfg.quad.validate()?;
        let n = sheet.n();
        let mut sol = Self {
            sheet: sheet.clone(),
            cfg: *cfg,
            problems: vec![None; n],
            tables: vec![None; n],
            barriers: vec![None; n + 1],
            evidence: Vec::new(),
            failure: None,
        };
        sol.barriers[n] = Some(sheet.k_n());
        let d = greedy_sequence(sheet);
        let mut terminal = sheet.terminal_payoff()?;
        for i in (stop..n).rev() {
            let prob = reduced_problem(sheet, i, terminal.clone())?;
            sol.problems[i] = Some(prob.clone());
            if i == stop {
                break;
            }
            let t_i = sheet.date(i);
            let table = Arc::new(tabulate(sheet, cfg, &prob, i)?);
            sol.tables[i] = Some(table.clone());
            let upper = value_bounds(&prob, t_i)?.1;
            let c_bar = sheet.c_bar(i);
            let found = find_barrier(
                |x| Ok(table.value(x)),
                |x| solve_value(&prob, x, t_i, &cfg.quad),
                upper,
                c_bar,
                i,
                t_i,
                cfg.scan_points,
            );
            let (k, mut ev) = match found {
                Ok(v) => v,
                Err(e) if tolerant => {
                    sol.failure = Some((i, e));
                    return Ok(sol);
                }
                Err(e) => return Err(e),
            };
            ev.sufficient_condition = Some(sheet.recovery == 1.0 || d[i] < 1.0);
            sol.barriers[i] = Some(k);
            sol.evidence.push(ev);
            terminal = next_terminal(table, c_bar, k, sheet.recovery, upper)?;
        }
        sol.evidence.reverse();
        Ok(sol)
    }

    pub fn sheet(&self) -> &BondTermSheet {
        &self.sheet
    }

    /// Reduced problem of interval `i`.
    pub fn problem(&self, i: usize) -> Result<&TVProblem> {
        self.problems
            .get(i)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Domain(format!("interval {i} was not computed")))
    }

    /// Table of `u_k(., T_k)` for `1 <= k <= N - 1`.
    pub fn table(&self, k: usize) -> Option<&DeflatedValueFn> {
        self.tables.get(k).and_then(Option::as_deref)
    }

    /// Coupon date at which the barrier search failed, for partial builds.
    pub fn failed_date(&self) -> Option<usize> {
        self.failure.as_ref().map(|f| f.0)
    }

    pub fn failure(&self) -> Option<&Error> {
        self.failure.as_ref().map(|f| &f.1)
    }

    pub fn barrier_set(&self) -> Result<BarrierSet> {
        if let Some((_, e)) = &self.failure {
            return Err(e.clone());
        }
        let barriers = self.barriers[1..]
            .iter()
            .map(|b| b.ok_or_else(|| Error::Domain("barriers were not all computed".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(BarrierSet {
            barriers,
            evidence: self.evidence.clone(),
        })
    }

    fn bracket_problem(&self, t: f64) -> Result<&TVProblem> {
        let i = self.sheet.bracket(t)?;
        self.problem(i)
    }

    /// `u_i(x, t)` for the interval containing `t`.
    pub fn deflated_value(&self, x: f64, t: f64) -> Result<f64> {
        solve_value(self.bracket_problem(t)?, x, t, &self.cfg.quad)
    }

    pub fn deflated_gradient(&self, x: f64, t: f64) -> Result<f64> {
        solve_gradient(self.bracket_problem(t)?, x, t, &self.cfg.quad)
    }

    pub fn deflated_second(&self, x: f64, t: f64) -> Result<f64> {
        solve_second_derivative(self.bracket_problem(t)?, x, t, &self.cfg.quad)
    }

    /// Bond price `Z(r, t; T_N) u_i(V / Z, t)`.
    pub fn price(&self, v: f64, r: f64, t: f64) -> Result<f64> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!(
                "firm value must be positive, got {v}"
            )));
        }
        let z = self.sheet.discount(r, t)?;
        Ok(z * self.deflated_value(v / z, t)?)
    }
}

/// Log grid centred on `ln Phi_0` wide enough for every later kernel evaluation.
fn tabulate(
    sheet: &BondTermSheet,
    cfg: &BondConfig,
    prob: &TVProblem,
    i: usize,
) -> Result<DeflatedValueFn> {
    let variance = &prob.curves.variance;
    let total = variance.integral(0.0, sheet.maturity());
    let local = variance.integral(sheet.date(i), sheet.date(i + 1));
    let width = (14.0 * total.sqrt() + sheet.firm.b.abs() * sheet.maturity() + 1.0).max(6.0);
    let mut h = cfg.table_step.min(local.sqrt() / 16.0);
    h = h.max(width / 100_000.0);
    let n = (2.0 * width / h).ceil() as usize + 1;
    let xi_lo = sheet.phi(0).ln() - width;
    let t = sheet.date(i);
    let quad = cfg.quad;
    DeflatedValueFn::tabulate(xi_lo, h, n, |x| {
        Ok((
            solve_value(prob, x, t, &quad)?,
            solve_gradient(prob, x, t, &quad)?,
            solve_second_derivative(prob, x, t, &quad)?,
        ))
    })
}

/// `[u(x) + c_bar] 1{x > K} + delta x 1{x <= K}` with `u` from a table.
fn next_terminal(
    table: Arc<DeflatedValueFn>,
    c_bar: f64,
    k: f64,
    delta: f64,
    upper: f64,
) -> Result<PiecewisePayoff> {
    let growth = GrowthCertificate {
        a: k + upper.max(0.0) + c_bar + 1.0,
        alpha: 0.0,
    };
    let shifted = Segment::custom(ShiftedTable {
        table,
        offset: c_bar,
    });
    if k == 0.0 {
        return PiecewisePayoff::new(Vec::new(), vec![shifted], growth);
    }
    PiecewisePayoff::new(
        vec![k],
        vec![Segment::poly(vec![0.0, delta]), shifted],
        growth,
    )
}

/// Bond price by backward recursion.
pub fn price_recursive(
    sheet: &BondTermSheet,
    v: f64,
    r: f64,
    t: f64,
    cfg: &BondConfig,
) -> Result<f64> {
    let i = sheet.bracket(t)?;
    RecursiveSolution::build_from(sheet, cfg, i)?.price(v, r, t)
}

/// Barriers `K_1..K_N` with their evidence.
pub fn compute_barriers(sheet: &BondTermSheet, cfg: &BondConfig) -> Result<BarrierSet> {
    RecursiveSolution::build(sheet, cfg)?.barrier_set()
}

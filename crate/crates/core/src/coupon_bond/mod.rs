//! Defaultable discrete coupon bond with Vasicek rates, a structural
//! (endogenous barrier) default at coupon dates and Poisson unexpected default.
//!
//! Prices are computed in deflated coordinates `x = V / Z(r, t; T_N)`, where
//! the problem on each coupon interval is a one dimensional inhomogeneous
//! Black-Scholes problem with rate `lambda`, dividend `lambda + b` and source
//! `lambda * min(Phi_i, delta * x)`.
//!
//! A coupon `C_i` paid at `T_i < T_N` is worth `C_i Z(r, T_i; T_N)` at `T_i`,
//! that is the discounted value of `C_i` paid at maturity.

mod barrier;
mod closed_form;
mod recursion;
mod table;

pub use barrier::{
    check_uniqueness_conditions, find_barrier, greedy_sequence, BarrierEvidence, UniquenessReport,
};
pub use closed_form::{initial_price_formula, price_closed_form, price_closed_form_deflated};
pub use recursion::{compute_barriers, price_recursive, RecursiveSolution};
pub use table::{DeflatedValueFn, ShiftedTable};

use crate::binaries::{BinaryModel, MvnConfig};
use crate::bs_engine::{QuadratureConfig, TVProblem};
use crate::error::{Error, Result};
use crate::payoff::PiecewisePayoff;
use crate::term_model::{
    effective_variance_curve, reduced_curves, zcb_price, CoefficientCurves, FirmParams,
    VasicekParams,
};

/// Contractual and model data of a defaultable coupon bond.
#[derive(Debug, Clone, PartialEq)]
pub struct BondTermSheet {
    pub face: f64,
    /// `C_1..C_N`.
    pub coupons: Vec<f64>,
    /// `T_1 < ... < T_N`; `T_N` is the maturity.
    pub dates: Vec<f64>,
    pub recovery: f64,
    pub intensity: f64,
    pub firm: FirmParams,
    pub rates: VasicekParams,
}

impl BondTermSheet {
    pub fn new(
        face: f64,
        coupons: Vec<f64>,
        dates: Vec<f64>,
        recovery: f64,
        intensity: f64,
        firm: FirmParams,
        rates: VasicekParams,
    ) -> Result<Self> {
        let sheet = Self {
            face,
            coupons,
            dates,
            recovery,
            intensity,
            firm,
            rates,
        };
        sheet.validate()?;
        Ok(sheet)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Validation(m.to_string()));
        if !(self.face > 0.0) || !self.face.is_finite() {
            return bad("face value must be positive");
        }
        if self.coupons.is_empty() || self.coupons.len() != self.dates.len() {
            return bad("coupon amounts and dates must be nonempty and of equal length");
        }
        if self.coupons.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
            return bad("coupons must be nonnegative");
        }
        if !(self.dates[0] > 0.0) || self.dates.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("coupon dates must be positive and strictly increasing");
        }
        if self.dates.iter().any(|d| !d.is_finite()) {
            return bad("coupon dates must be finite");
        }
        if !(0.0..=1.0).contains(&self.recovery) {
            return bad("recovery fraction must lie in [0, 1]");
        }
        if !(self.intensity >= 0.0) || !self.intensity.is_finite() {
            return bad("default intensity must be nonnegative");
        }
        Ok(())
    }

    /// Number of coupon dates `N`.
    pub fn n(&self) -> usize {
        self.coupons.len()
    }

    pub fn maturity(&self) -> f64 {
        self.dates[self.n() - 1]
    }

    /// `T_i` for `i = 0..=N` with `T_0 = 0`.
    pub fn date(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.dates[i - 1]
        }
    }

    /// `c_bar_i` for `i = 1..=N`: the coupon, plus the face value at maturity.
    pub fn c_bar(&self, i: usize) -> f64 {
        let c = self.coupons[i - 1];
        if i == self.n() {
            self.face + c
        } else {
            c
        }
    }

    /// `Phi_i = F + sum_{k > i} C_k` for `i = 0..N`: the recovery cap on `(T_i, T_{i+1}]`.
    pub fn phi(&self, i: usize) -> f64 {
        self.face + self.coupons[i..].iter().sum::<f64>()
    }

    /// `K_N = F + C_N`.
    pub fn k_n(&self) -> f64 {
        self.c_bar(self.n())
    }

    /// Coefficient curves of the reduced problem.
    pub fn curves(&self) -> CoefficientCurves {
        reduced_curves(&self.rates, &self.firm, self.intensity, self.maturity())
    }

    pub fn binary_model(&self) -> BinaryModel {
        BinaryModel::new(
            self.intensity,
            self.firm.b,
            effective_variance_curve(&self.rates, &self.firm, self.maturity()),
        )
    }

    /// `Z(r, t; T_N)`.
    pub fn discount(&self, r: f64, t: f64) -> Result<f64> {
        zcb_price(&self.rates, r, t, self.maturity())
    }

    /// Index `i` of the coupon interval with `T_i < t <= T_{i+1}` (`[0, T_1]` for `i = 0`).
    pub fn bracket(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0 && t <= self.maturity()) {
            return Err(Error::Domain(format!(
                "t = {t} lies outside [0, {}]",
                self.maturity()
            )));
        }
        Ok(self.dates.partition_point(|&d| d < t))
    }

    /// Source term `lambda * min(Phi_i, delta * x)` of interval `i`.
    pub fn source(&self, i: usize) -> Result<PiecewisePayoff> {
        PiecewisePayoff::min_with_cap(self.intensity, self.recovery, self.phi(i))
    }

    /// `c_bar_N 1{x > K_N} + delta x 1{x <= K_N}`.
    pub fn terminal_payoff(&self) -> Result<PiecewisePayoff> {
        PiecewisePayoff::bond_terminal(self.k_n(), self.k_n(), self.recovery)
    }
}

/// Reduced problem on `(T_i, T_{i+1}]` for a given terminal payoff.
pub fn reduced_problem(
    sheet: &BondTermSheet,
    i: usize,
    terminal: PiecewisePayoff,
) -> Result<TVProblem> {
    if i >= sheet.n() {
        return Err(Error::Domain(format!("interval index {i} out of range")));
    }
    TVProblem::new(
        sheet.curves(),
        terminal,
        sheet.source(i)?,
        sheet.date(i + 1),
    )
}

/// The reduced problem of interval `i`. For `i < N - 1` the terminal payoff
/// comes from the backward recursion over the later intervals.
pub fn reduce_to_1d(sheet: &BondTermSheet, i: usize, cfg: &BondConfig) -> Result<TVProblem> {
    if i >= sheet.n() {
        return Err(Error::Domain(format!("interval index {i} out of range")));
    }
    if i == sheet.n() - 1 {
        return reduced_problem(sheet, i, sheet.terminal_payoff()?);
    }
    let sol = RecursiveSolution::build_from(sheet, cfg, i)?;
    Ok(sol.problem(i)?.clone())
}

/// Numerical settings for bond pricing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondConfig {
    pub quad: QuadratureConfig,
    pub mvn: MvnConfig,
    /// Largest log step of the value tables.
    pub table_step: f64,
    /// Points of the sign scan used to detect multiple barrier roots.
    pub scan_points: usize,
}

impl Default for BondConfig {
    fn default() -> Self {
        Self {
            quad: QuadratureConfig::default(),
            mvn: MvnConfig {
                abs_tol: 5e-7,
                ..MvnConfig::default()
            },
            table_step: 0.02,
            scan_points: 512,
        }
    }
}

/// Default barriers `K_1..K_N` (deflated units) with per-date evidence for `K_1..K_{N-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierSet {
    pub barriers: Vec<f64>,
    pub evidence: Vec<BarrierEvidence>,
}

impl BarrierSet {
    /// `K_i` for `i = 1..=N`.
    pub fn k(&self, i: usize) -> f64 {
        self.barriers[i - 1]
    }
}

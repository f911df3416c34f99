//! Reports produced by the commands. JSON field order follows the struct
//! field order; CSV column order is fixed by the `*_HEADER` constants.

use std::io::{self, Write};

use serde::Serialize;

use super::sheet::{PricingInput, Profile};
use crate::binaries::DIMENSION_CAP;
use crate::bs_engine::solve_value;
use crate::coupon_bond::{
    check_uniqueness_conditions, initial_price_formula, price_closed_form, reduce_to_1d,
    BarrierSet, BondTermSheet, RecursiveSolution, UniquenessReport,
};
use crate::error::{Error, Result};
use crate::oracles::{fd_solve_reduced, mc_bond_price, merton_debt, FdConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Recursive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierRow {
    pub index: usize,
    pub date: f64,
    pub c_bar: f64,
    pub barrier: f64,
    pub sign_changes: Option<usize>,
    pub residual: Option<f64>,
    pub sufficient_condition: Option<bool>,
}

pub const BARRIER_HEADER: &str =
    "index,date,c_bar,barrier,sign_changes,residual,sufficient_condition";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessRow {
    pub index: usize,
    pub date: f64,
    pub d: f64,
    pub required: f64,
    pub sufficient_ok: bool,
    pub empirical_unique: Option<bool>,
    pub slope_one_points: Vec<f64>,
}

impl From<&UniquenessReport> for UniquenessRow {
    fn from(r: &UniquenessReport) -> Self {
        Self {
            index: r.date_index,
            date: r.date,
            d: r.d,
            required: r.required,
            sufficient_ok: r.sufficient_ok,
            empirical_unique: r.empirical_unique,
            slope_one_points: r.s_points.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub oracle: &'static str,
    pub value: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceReport {
    pub method: Method,
    pub t: f64,
    pub firm_value: f64,
    pub short_rate: f64,
    pub discount_factor: f64,
    pub deflated_x: f64,
    pub price: f64,
    pub barriers: Vec<BarrierRow>,
    pub uniqueness: Vec<UniquenessRow>,
    pub cross_check: Option<CrossCheck>,
}

pub const PRICE_HEADER: &str = "t,firm_value,short_rate,price,method";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierReport {
    pub barriers: Vec<BarrierRow>,
    pub uniqueness: Vec<UniquenessRow>,
}

pub fn barrier_rows(sheet: &BondTermSheet, set: &BarrierSet) -> Vec<BarrierRow> {
    (1..=sheet.n())
        .map(|i| {
            let ev = set.evidence.iter().find(|e| e.date_index == i);
            BarrierRow {
                index: i,
                date: sheet.date(i),
                c_bar: sheet.c_bar(i),
                barrier: set.k(i),
                sign_changes: ev.map(|e| e.sign_changes),
                residual: ev.map(|e| e.residual),
                sufficient_condition: ev.and_then(|e| e.sufficient_condition),
            }
        })
        .collect()
}

/// The binary representation is used while every multivariate normal
/// probability it needs is computed without sampling error.
pub fn closed_form_practical(input: &PricingInput) -> bool {
    let n = input.sheet.n();
    n <= DIMENSION_CAP && input.numerics.bond.mvn.is_deterministic(n)
}

/// Zero coupon debt without intensity or payout has a Merton-type closed form.
fn merton_eligible(sheet: &BondTermSheet) -> bool {
    sheet.n() == 1 && sheet.coupons[0] == 0.0 && sheet.intensity == 0.0 && sheet.firm.b == 0.0
}

fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn price_report(input: &PricingInput, t: f64, v: f64, r: f64) -> Result<PriceReport> {
    let sheet = &input.sheet;
    let cfg = &input.numerics.bond;
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Validation(format!(
            "firm value must be positive, got {v}"
        )));
    }
    sheet.bracket(t)?;
    let sol = RecursiveSolution::build(sheet, cfg)?;
    let set = sol.barrier_set()?;
    let (method, price) = if closed_form_practical(input) {
        (
            Method::ClosedForm,
            price_closed_form(sheet, &set, v, r, t, cfg)?,
        )
    } else {
        (Method::Recursive, sol.price(v, r, t)?)
    };
    let z = sheet.discount(r, t)?;
    let uniqueness = check_uniqueness_conditions(sheet, cfg, None)?;
    let cross_check = merton_eligible(sheet).then(|| {
        let value = merton_debt(
            sheet.face,
            sheet.recovery,
            sheet.maturity() - t,
            v,
            r,
            &sheet.rates,
            &sheet.firm,
        );
        CrossCheck {
            oracle: "merton",
            value,
            rel_diff: rel_diff(price, value),
        }
    });
    Ok(PriceReport {
        method,
        t,
        firm_value: v,
        short_rate: r,
        discount_factor: z,
        deflated_x: v / z,
        price,
        barriers: barrier_rows(sheet, &set),
        uniqueness: uniqueness.iter().map(UniquenessRow::from).collect(),
        cross_check,
    })
}

pub fn barrier_report(input: &PricingInput) -> Result<BarrierReport> {
    let sheet = &input.sheet;
    let cfg = &input.numerics.bond;
    let set = RecursiveSolution::build(sheet, cfg)?.barrier_set()?;
    let uniqueness = check_uniqueness_conditions(sheet, cfg, None)?;
    Ok(BarrierReport {
        barriers: barrier_rows(sheet, &set),
        uniqueness: uniqueness.iter().map(UniquenessRow::from).collect(),
    })
}

fn opt<T: std::fmt::Debug>(v: Option<T>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn write_price_csv(w: &mut impl Write, r: &PriceReport) -> io::Result<()> {
    writeln!(w, "{PRICE_HEADER}")?;
    let method = match r.method {
        Method::ClosedForm => "closed_form",
        Method::Recursive => "recursive",
    };
    writeln!(
        w,
        "{:?},{:?},{:?},{:?},{method}",
        r.t, r.firm_value, r.short_rate, r.price
    )
}

pub fn write_barrier_csv(w: &mut impl Write, rows: &[BarrierRow]) -> io::Result<()> {
    writeln!(w, "{BARRIER_HEADER}")?;
    for b in rows {
        writeln!(
            w,
            "{},{:?},{:?},{:?},{},{},{}",
            b.index,
            b.date,
            b.c_bar,
            b.barrier,
            opt(b.sign_changes),
            opt(b.residual),
            opt(b.sufficient_condition)
        )?;
    }
    Ok(())
}

/// Firm values from `lo:hi:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
    pub log: bool,
}

impl std::str::FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Validation(format!("grid {s:?} is not of the form lo:hi:n"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !(lo > 0.0) || !(hi > lo) || !hi.is_finite() || n < 2 {
            return Err(Error::Validation(format!(
                "grid needs 0 < lo < hi and at least 2 points, got {s:?}"
            )));
        }
        Ok(Self {
            lo,
            hi,
            n,
            log: false,
        })
    }
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        let step = |k: usize| k as f64 / (self.n - 1) as f64;
        (0..self.n)
            .map(|k| {
                if k == self.n - 1 {
                    self.hi
                } else if self.log {
                    self.lo * (self.hi / self.lo).powf(step(k))
                } else {
                    self.lo + (self.hi - self.lo) * step(k)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveRow {
    pub firm_value: f64,
    pub price: f64,
    pub deflated_u: f64,
    pub du_dx: f64,
    pub d2u_dx2: f64,
}

pub const CURVE_HEADER: &str = "firm_value,price,deflated_u,du_dx,d2u_dx2";

pub fn curve_rows(input: &PricingInput, grid: &Grid, t: f64, r: f64) -> Result<Vec<CurveRow>> {
    let sheet = &input.sheet;
    let i = sheet.bracket(t)?;
    let sol = RecursiveSolution::build_from(sheet, &input.numerics.bond, i)?;
    let z = sheet.discount(r, t)?;
    grid.points()
        .into_iter()
        .map(|v| {
            let x = v / z;
            let u = sol.deflated_value(x, t)?;
            Ok(CurveRow {
                firm_value: v,
                price: z * u,
                deflated_u: u,
                du_dx: sol.deflated_gradient(x, t)?,
                d2u_dx2: sol.deflated_second(x, t)?,
            })
        })
        .collect()
}

pub fn write_curve_csv(w: &mut impl Write, rows: &[CurveRow]) -> io::Result<()> {
    writeln!(w, "{CURVE_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{:?},{:?},{:?},{:?},{:?}",
            r.firm_value, r.price, r.deflated_u, r.du_dx, r.d2u_dx2
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Quick,
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub tolerance: f64,
    pub achieved: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, tolerance: f64, achieved: f64, detail: String) -> Self {
        Self {
            name,
            tolerance,
            achieved,
            passed: achieved <= tolerance,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub profile: Profile,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Largest relative gap between the finite difference grid and the kernel
/// solution over the central half of the grid on the last coupon interval,
/// visiting every `stride`-th node. Values below `floor` are compared absolutely.
pub fn fd_cross_check(
    sheet: &BondTermSheet,
    input: &PricingInput,
    stride: usize,
) -> Result<(f64, usize)> {
    let n = sheet.n();
    let cfg = &input.numerics.bond;
    let prob = reduce_to_1d(sheet, n - 1, cfg)?;
    let t0 = sheet.date(n - 1);
    let fd = fd_solve_reduced(
        &prob,
        &FdConfig {
            t_end: t0,
            ..input.numerics.fd
        },
    )?;
    let (lo, hi) = (fd.xi[0], fd.xi[fd.xi.len() - 1]);
    let (mid, quarter) = (0.5 * (lo + hi), 0.25 * (hi - lo));
    let floor = 1e-3 * sheet.phi(0);
    let mut worst = 0.0f64;
    let mut count = 0;
    for (j, (&xi, &u_fd)) in fd.xi.iter().zip(fd.final_values()).enumerate() {
        if j % stride.max(1) != 0 || (xi - mid).abs() > quarter {
            continue;
        }
        let u = solve_value(&prob, xi.exp(), t0, &cfg.quad)?;
        worst = worst.max((u_fd - u).abs() / u.abs().max(floor));
        count += 1;
    }
    Ok((worst, count))
}

pub fn verify_report(input: &PricingInput, level: Level) -> Result<VerifyReport> {
    let sheet = &input.sheet;
    let cfg = &input.numerics.bond;
    let (v0, r0) = (input.v0, input.r0);
    let mut checks = Vec::new();

    let stride = if level == Level::Quick { 8 } else { 1 };
    let (fd_err, nodes) = fd_cross_check(sheet, input, stride)?;
    checks.push(Check::new(
        "fd_last_interval",
        1e-3,
        fd_err,
        format!(
            "{} x {} grid, {nodes} interior nodes",
            input.numerics.fd.space_nodes, input.numerics.fd.time_steps
        ),
    ));

    let needs_closed_form = level == Level::Full || merton_eligible(sheet);
    let closed = if needs_closed_form && closed_form_practical(input) {
        let sol = RecursiveSolution::build(sheet, cfg)?;
        let set = sol.barrier_set()?;
        let ip = initial_price_formula(sheet, &set, v0, r0, cfg)?;
        Some((sol, set, ip))
    } else {
        None
    };

    if let Some((_, _, ip)) = &closed {
        if merton_eligible(sheet) {
            let m = merton_debt(
                sheet.face,
                sheet.recovery,
                sheet.maturity(),
                v0,
                r0,
                &sheet.rates,
                &sheet.firm,
            );
            checks.push(Check::new(
                "merton",
                1e-8,
                rel_diff(*ip, m),
                format!("oracle {m}"),
            ));
        }
    }

    if level == Level::Full {
        let reference = match &closed {
            Some((sol, set, ip)) => {
                let rec = sol.price(v0, r0, 0.0)?;
                let cf = price_closed_form(sheet, set, v0, r0, 0.0, cfg)?;
                let gap = rel_diff(rec, cf)
                    .max(rel_diff(rec, *ip))
                    .max(rel_diff(cf, *ip));
                checks.push(Check::new(
                    "triple_path",
                    1e-4,
                    gap,
                    format!("recursive {rec}, closed form {cf}, initial formula {ip}"),
                ));
                *ip
            }
            None => RecursiveSolution::build(sheet, cfg)?.price(v0, r0, 0.0)?,
        };
        let set = match &closed {
            Some((_, set, _)) => set.clone(),
            None => RecursiveSolution::build(sheet, cfg)?.barrier_set()?,
        };
        let mc = mc_bond_price(sheet, v0, r0, &set, &input.numerics.mc)?;
        let z = (mc.price - reference).abs() / mc.std_error.max(f64::MIN_POSITIVE);
        checks.push(Check::new(
            "monte_carlo",
            3.0,
            z,
            format!(
                "estimate {} with standard error {} over {} paths, reference {reference}",
                mc.price, mc.std_error, mc.paths
            ),
        ));
    }

    Ok(VerifyReport {
        level,
        profile: input.numerics.profile,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g: Grid = "0.5:2:4".parse().unwrap();
        assert_eq!(g.points(), vec![0.5, 1.0, 1.5, 2.0]);
        let g = Grid { log: true, ..g };
        let p = g.points();
        assert!((p[1] / p[0] - p[2] / p[1]).abs() < 1e-12);
        assert!("0:1:5".parse::<Grid>().is_err());
        assert!("1:2".parse::<Grid>().is_err());
        assert!("1:2:1".parse::<Grid>().is_err());
    }
}

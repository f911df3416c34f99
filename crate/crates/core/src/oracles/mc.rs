//! Monte Carlo simulation of the bond under correlated Vasicek rates and a
//! lognormal firm value with Poisson unexpected default.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};
use rayon::prelude::*;

use crate::coupon_bond::{BarrierSet, BondTermSheet, RecursiveSolution};
use crate::error::{Error, Result};
use crate::term_model::{vasicek_a, vasicek_b, zcb_price};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub paths: usize,
    pub steps_per_year: usize,
    pub seed: u64,
    /// Pairs every path with its sign-flipped twin.
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            paths: 1_000_000,
            steps_per_year: 250,
            seed: 20_240_601,
            antithetic: false,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.paths < 1 {
            return Err(Error::Validation("at least one path is required".into()));
        }
        if self.steps_per_year < 12 {
            return Err(Error::Validation(
                "steps_per_year must be at least 12".into(),
            ));
        }
        Ok(())
    }
}

/// Mean discounted cashflow and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub price: f64,
    pub std_error: f64,
    pub paths: usize,
}

/// How expected default at coupon dates is decided.
#[derive(Debug, Clone, Copy)]
pub enum DefaultRule<'a> {
    /// Default at `T_i` iff `V / Z <= K_i`.
    Barriers(&'a BarrierSet),
    /// Default at `T_i` iff `V <= Z (u_i(V / Z, T_i) + c_bar_i)`, using the
    /// tabulated value functions and no barrier.
    ValueFunction(&'a RecursiveSolution),
}

/// Monte Carlo price with the barrier default rule.
pub fn mc_bond_price(
    sheet: &BondTermSheet,
    v0: f64,
    r0: f64,
    barriers: &BarrierSet,
    cfg: &McConfig,
) -> Result<McEstimate> {
    mc_bond_price_with_rule(sheet, v0, r0, DefaultRule::Barriers(barriers), cfg)
}

const CHUNK: usize = 4096;

struct Step {
    decay: f64,
    mean_shift: f64,
    r_sd: f64,
    h: f64,
}

impl Step {
    fn new(a1: f64, a2: f64, s_r: f64, h: f64) -> Self {
        let decay = (-a2 * h).exp();
        Self {
            decay,
            mean_shift: a1 / a2 * (1.0 - decay),
            r_sd: s_r * ((1.0 - decay * decay) / (2.0 * a2)).sqrt(),
            h,
        }
    }
}

#[derive(Clone, Copy)]
struct State {
    r: f64,
    log_v: f64,
    int_r: f64,
}

pub fn mc_bond_price_with_rule(
    sheet: &BondTermSheet,
    v0: f64,
    r0: f64,
    rule: DefaultRule<'_>,
    cfg: &McConfig,
) -> Result<McEstimate> {
    cfg.validate()?;
    sheet.validate()?;
    if !(v0 > 0.0) || !v0.is_finite() {
        return Err(Error::Domain(format!(
            "firm value must be positive, got {v0}"
        )));
    }
    let n = sheet.n();
    if let DefaultRule::Barriers(b) = rule {
        if b.barriers.len() != n {
            return Err(Error::Domain(
                "barrier count does not match the term sheet".into(),
            ));
        }
    }
    let rates = sheet.rates;
    let (s_v, b, rho) = (sheet.firm.s_v, sheet.firm.b, sheet.firm.rho);
    let rho_perp = (1.0 - rho * rho).max(0.0).sqrt();
    let maturity = sheet.maturity();

    let mut grid = Vec::with_capacity(n);
    for i in 0..n {
        let dt = sheet.date(i + 1) - sheet.date(i);
        let steps = ((dt * cfg.steps_per_year as f64).ceil() as usize).max(1);
        grid.push((
            steps,
            Step::new(rates.a1, rates.a2, rates.s_r, dt / steps as f64),
        ));
    }

    let advance = |s: &mut State, st: &Step, z1: f64, z2: f64| {
        let r_next = s.r * st.decay + st.mean_shift + st.r_sd * z1;
        let r_avg = 0.5 * (s.r + r_next);
        s.int_r += r_avg * st.h;
        s.log_v +=
            (r_avg - b - 0.5 * s_v * s_v) * st.h + s_v * st.h.sqrt() * (rho * z1 + rho_perp * z2);
        s.r = r_next;
    };

    let discount = |r: f64, t: f64| zcb_price(&rates, r, t, maturity);
    let mut date_ab = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = sheet.date(i);
        date_ab.push((
            vasicek_a(&rates, t, maturity)?,
            vasicek_b(&rates, t, maturity)?,
        ));
    }
    let date_discount = |i: usize, r: f64| (date_ab[i].0 - date_ab[i].1 * r).exp();
    let defaults_at = |i: usize, v: f64, z: f64| -> Result<bool> {
        let x = v / z;
        Ok(match rule {
            DefaultRule::Barriers(set) => x <= set.k(i),
            DefaultRule::ValueFunction(sol) => {
                let table = sol
                    .table(i)
                    .ok_or_else(|| Error::Domain(format!("no value table at coupon date {i}")))?;
                x <= table.value(x) + sheet.c_bar(i)
            }
        })
    };

    // one path; `sign` flips every normal draw
    let run_path =
        |rng: &mut ChaCha8Rng, normals: &mut Vec<f64>, clock: f64, sign: f64| -> Result<f64> {
            let mut s = State {
                r: r0,
                log_v: v0.ln(),
                int_r: 0.0,
            };
            let mut payoff = 0.0;
            let mut k = 0;
            for i in 0..n {
                let (steps, ref st) = grid[i];
                let t_start = sheet.date(i);
                for j in 0..steps {
                    let t = t_start + j as f64 * st.h;
                    let (z1, z2) = draw(rng, normals, k, sign);
                    k += 1;
                    if clock <= t + st.h && clock > t {
                        let partial = Step::new(rates.a1, rates.a2, rates.s_r, clock - t);
                        let mut p = s;
                        advance(&mut p, &partial, z1, z2);
                        let z = discount(p.r, clock)?;
                        let recovery = (sheet.recovery * p.log_v.exp()).min(sheet.phi(i) * z);
                        return Ok(payoff + (-p.int_r).exp() * recovery);
                    }
                    advance(&mut s, st, z1, z2);
                }
                let v = s.log_v.exp();
                let df = (-s.int_r).exp();
                if i + 1 == n {
                    let survive = v > sheet.k_n();
                    return Ok(payoff
                        + df * if survive {
                            sheet.k_n()
                        } else {
                            sheet.recovery * v
                        });
                }
                let z = date_discount(i + 1, s.r);
                if defaults_at(i + 1, v, z)? {
                    return Ok(payoff + df * sheet.recovery * v);
                }
                payoff += df * sheet.coupons[i] * z;
            }
            Ok(payoff)
        };

    let exp = if sheet.intensity > 0.0 {
        Some(Exp::new(sheet.intensity).map_err(|e| Error::Domain(e.to_string()))?)
    } else {
        None
    };
    let units = if cfg.antithetic {
        cfg.paths.div_ceil(2)
    } else {
        cfg.paths
    };
    let chunks = units.div_ceil(CHUNK);
    let sums = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<(f64, f64, usize)> {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(c as u64 + 1);
            let count = CHUNK.min(units - c * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            let mut normals = Vec::new();
            for _ in 0..count {
                let clock = exp.map_or(f64::INFINITY, |e| rng.sample(e));
                normals.clear();
                let y = if cfg.antithetic {
                    let first = run_path(&mut rng, &mut normals, clock, 1.0)?;
                    let twin = run_path(&mut rng, &mut normals, clock, -1.0)?;
                    0.5 * (first + twin)
                } else {
                    run_path(&mut rng, &mut normals, clock, 1.0)?
                };
                s1 += y;
                s2 += y * y;
            }
            Ok((s1, s2, count))
        })
        .collect::<Result<Vec<_>>>()?;
    let s1 = pairwise_sum(&sums.iter().map(|s| s.0).collect::<Vec<_>>());
    let s2 = pairwise_sum(&sums.iter().map(|s| s.1).collect::<Vec<_>>());
    let m: usize = sums.iter().map(|s| s.2).sum();
    let mean = s1 / m as f64;
    let var = ((s2 / m as f64 - mean * mean) * m as f64 / (m as f64 - 1.0).max(1.0)).max(0.0);
    Ok(McEstimate {
        price: mean,
        std_error: (var / m as f64).sqrt(),
        paths: if cfg.antithetic { 2 * m } else { m },
    })
}

/// The `k`-th pair of normals of the current path. Draws are recorded on the
/// first (`sign = 1`) pass and replayed with flipped signs on the second; a
/// second pass outliving the first continues with fresh draws.
fn draw(rng: &mut ChaCha8Rng, normals: &mut Vec<f64>, k: usize, sign: f64) -> (f64, f64) {
    if sign > 0.0 || 2 * k + 1 >= normals.len() {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        normals.push(z1);
        normals.push(z2);
        (z1, z2)
    } else {
        (-normals[2 * k], -normals[2 * k + 1])
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

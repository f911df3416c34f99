//! Theta-scheme finite differences for the one dimensional problem in `ln x`.

use crate::bs_engine::TVProblem;
use crate::error::{Error, Result};
use crate::math::quadrature::gl_fixed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    pub space_nodes: usize,
    pub time_steps: usize,
    /// Half width of the grid in standard deviations of `ln x` over the horizon.
    pub log_x_span: f64,
    /// 0.5 is Crank-Nicolson, 1 fully implicit.
    pub theta: f64,
    /// Fully implicit half steps taken first.
    pub rannacher_steps: usize,
    /// Earliest time of the solution.
    pub t_end: f64,
    /// Grid centre in `x`; defaults to the geometric mean of the breakpoints.
    pub center: Option<f64>,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self {
            space_nodes: 800,
            time_steps: 800,
            log_x_span: 8.0,
            theta: 0.5,
            rannacher_steps: 4,
            t_end: 0.0,
            center: None,
        }
    }
}

impl FdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.space_nodes < 3 || self.time_steps < 1 {
            return Err(Error::Validation(
                "need at least 3 space nodes and one time step".into(),
            ));
        }
        if !(self.log_x_span >= 6.0) {
            return Err(Error::Validation("log_x_span must be at least 6".into()));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::Validation("theta must lie in [0, 1]".into()));
        }
        if self.center.is_some_and(|c| !(c > 0.0)) {
            return Err(Error::Validation("grid centre must be positive".into()));
        }
        Ok(())
    }
}

/// Values on a uniform `ln x` grid at every computed time level.
#[derive(Debug, Clone)]
pub struct FdSolution {
    pub xi: Vec<f64>,
    /// Decreasing from the horizon down to `t_end`.
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl FdSolution {
    pub fn x_nodes(&self) -> Vec<f64> {
        self.xi.iter().map(|v| v.exp()).collect()
    }

    /// Grid values at the earliest time.
    pub fn final_values(&self) -> &[f64] {
        &self.values[self.values.len() - 1]
    }

    /// Cubic Lagrange interpolation in `ln x`, linear in time.
    pub fn value(&self, x: f64, t: f64) -> Result<f64> {
        let n = self.xi.len();
        let xi = x.ln();
        if !(xi >= self.xi[0] && xi <= self.xi[n - 1]) {
            return Err(Error::Domain(format!("x = {x} lies outside the grid")));
        }
        let (first, last) = (self.times[self.times.len() - 1], self.times[0]);
        if !(t >= first && t <= last) {
            return Err(Error::Domain(format!(
                "t = {t} lies outside [{first}, {last}]"
            )));
        }
        let k = self
            .times
            .iter()
            .position(|&s| s <= t)
            .unwrap_or(self.times.len() - 1);
        let at = |level: usize| -> f64 {
            let h = self.xi[1] - self.xi[0];
            let pos = (xi - self.xi[0]) / h;
            let j0 = (pos.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
            let mut sum = 0.0;
            for a in 0..4 {
                let mut w = 1.0;
                for b in 0..4 {
                    if a != b {
                        w *= (pos - (j0 + b) as f64) / (a as f64 - b as f64);
                    }
                }
                sum += w * self.values[level][j0 + a];
            }
            sum
        };
        if k == 0 || self.times[k] == t {
            return Ok(at(k));
        }
        let (ta, tb) = (self.times[k], self.times[k - 1]);
        let w = (t - ta) / (tb - ta);
        Ok((1.0 - w) * at(k) + w * at(k - 1))
    }
}

/// Zero volatility value, used as the Dirichlet boundary condition.
fn deterministic_value(prob: &TVProblem, x: f64, t: f64) -> Result<f64> {
    let c = &prob.curves;
    let big_t = prob.horizon;
    if t >= big_t {
        return prob.terminal.eval(x);
    }
    let fwd = |s: f64| x * (c.rate.integral(t, s) - c.dividend.integral(t, s)).exp();
    let mut v = (-c.rate.integral(t, big_t)).exp() * prob.terminal.eval(fwd(big_t))?;
    let err = std::cell::RefCell::new(None);
    v += gl_fixed(
        |s| match prob.source.eval(fwd(s)) {
            Ok(g) => (-c.rate.integral(t, s)).exp() * g,
            Err(e) => {
                *err.borrow_mut() = Some(e);
                0.0
            }
        },
        t,
        big_t,
        32,
    );
    match err.into_inner() {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Replaces nodal terminal values by cell averages in `ln x` wherever a
/// breakpoint of the terminal data falls inside the cell.
fn smooth_terminal(prob: &TVProblem, xi: &[f64], h: f64, v: &mut [f64]) -> Result<()> {
    let jumps: Vec<f64> = prob.terminal.breakpoints().iter().map(|k| k.ln()).collect();
    for (j, &centre) in xi.iter().enumerate() {
        let (lo, hi) = (centre - 0.5 * h, centre + 0.5 * h);
        let mut knots = vec![lo];
        knots.extend(jumps.iter().copied().filter(|&k| k > lo && k < hi));
        if knots.len() == 1 {
            continue;
        }
        knots.push(hi);
        let mut sum = 0.0;
        for w in knots.windows(2) {
            let err = std::cell::RefCell::new(None);
            sum += gl_fixed(
                |s| {
                    prob.terminal.eval(s.exp()).unwrap_or_else(|e| {
                        *err.borrow_mut() = Some(e);
                        0.0
                    })
                },
                w[0],
                w[1],
                8,
            );
            if let Some(e) = err.into_inner() {
                return Err(e);
            }
        }
        v[j] = sum / h;
    }
    Ok(())
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut beta = diag[0];
    rhs[0] /= beta;
    for j in 1..n {
        c[j - 1] = upper[j - 1] / beta;
        beta = diag[j] - lower[j] * c[j - 1];
        rhs[j] = (rhs[j] - lower[j] * rhs[j - 1]) / beta;
    }
    for j in (0..n - 1).rev() {
        rhs[j] -= c[j] * rhs[j + 1];
    }
}

/// Solves the problem backwards from its horizon to `cfg.t_end`.
pub fn fd_solve_reduced(prob: &TVProblem, cfg: &FdConfig) -> Result<FdSolution> {
    cfg.validate()?;
    let big_t = prob.horizon;
    let t_end = cfg.t_end;
    if !(t_end >= 0.0 && t_end < big_t) {
        return Err(Error::Domain(format!("t_end must lie in [0, {big_t})")));
    }
    let c = &prob.curves;
    let sd = c.variance.integral(t_end, big_t).sqrt().max(0.05);
    let drift = (c.rate.integral(t_end, big_t) - c.dividend.integral(t_end, big_t)).abs();
    let centre = match cfg.center {
        Some(x) => x.ln(),
        None => {
            let bps: Vec<f64> = prob
                .terminal
                .breakpoints()
                .iter()
                .chain(prob.source.breakpoints())
                .map(|k| k.ln())
                .collect();
            if bps.is_empty() {
                0.0
            } else {
                bps.iter().sum::<f64>() / bps.len() as f64
            }
        }
    };
    let width = cfg.log_x_span * sd + drift;
    let m = cfg.space_nodes;
    let h = 2.0 * width / (m - 1) as f64;
    let xi: Vec<f64> = (0..m).map(|j| centre - width + h * j as f64).collect();
    let xs: Vec<f64> = xi.iter().map(|v| v.exp()).collect();
    let g: Vec<f64> = xs
        .iter()
        .map(|&x| prob.source.eval(x))
        .collect::<Result<_>>()?;
    let mut v: Vec<f64> = xs
        .iter()
        .map(|&x| prob.terminal.eval(x))
        .collect::<Result<_>>()?;
    smooth_terminal(prob, &xi, h, &mut v)?;
    let scale = 1.0
        + v.iter().fold(0.0f64, |a, b| a.max(b.abs()))
        + g.iter().fold(0.0f64, |a, b| a.max(b.abs())) * (big_t - t_end);

    let dt = (big_t - t_end) / cfg.time_steps as f64;
    let half_steps = cfg.rannacher_steps.min(2 * cfg.time_steps);
    let mut levels: Vec<f64> = (0..half_steps)
        .map(|k| big_t - 0.5 * dt * (k + 1) as f64)
        .collect();
    let mut t_now = big_t - 0.5 * dt * half_steps as f64;
    while t_now - dt > t_end + 1e-12 * dt {
        t_now -= dt;
        levels.push(t_now);
    }
    if t_now > t_end {
        levels.push(t_end);
    }

    let mut times = vec![big_t];
    let mut values = vec![v.clone()];
    let (mut lower, mut diag, mut upper) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let mut rhs = vec![0.0; m];
    let mut t_prev = big_t;
    for (step, &t_next) in levels.iter().enumerate() {
        let theta = if step < half_steps { 1.0 } else { cfg.theta };
        let tau = t_prev - t_next;
        let var = c.variance.integral(t_next, t_prev) / tau;
        let r = c.rate.integral(t_next, t_prev) / tau;
        let q = c.dividend.integral(t_next, t_prev) / tau;
        let mu = r - q - 0.5 * var;
        let a = 0.5 * var / (h * h) - 0.5 * mu / h;
        let b = -var / (h * h) - r;
        let cc = 0.5 * var / (h * h) + 0.5 * mu / h;
        for j in 1..m - 1 {
            let lv = a * v[j - 1] + b * v[j] + cc * v[j + 1];
            rhs[j] = v[j] + (1.0 - theta) * tau * lv + tau * g[j];
            lower[j] = -theta * tau * a;
            diag[j] = 1.0 - theta * tau * b;
            upper[j] = -theta * tau * cc;
        }
        diag[0] = 1.0;
        upper[0] = 0.0;
        rhs[0] = deterministic_value(prob, xs[0], t_next)?;
        lower[m - 1] = 0.0;
        diag[m - 1] = 1.0;
        rhs[m - 1] = deterministic_value(prob, xs[m - 1], t_next)?;
        thomas(&lower, &diag, &upper, &mut rhs);
        if rhs.iter().any(|x| !x.is_finite() || x.abs() > 1e8 * scale) {
            return Err(Error::Unstable { t: t_next });
        }
        v.copy_from_slice(&rhs);
        times.push(t_next);
        values.push(v.clone());
        t_prev = t_next;
    }
    Ok(FdSolution { xi, times, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payoff::PiecewisePayoff;
    use crate::term_model::CoefficientCurves;

    #[test]
    fn constant_payoff_discounts() {
        let prob = TVProblem::homogeneous(
            CoefficientCurves::constant(0.05, 0.02, 0.3),
            PiecewisePayoff::constant(1.0),
            2.0,
        )
        .unwrap();
        let cfg = FdConfig {
            space_nodes: 200,
            time_steps: 100,
            center: Some(1.0),
            ..FdConfig::default()
        };
        let sol = fd_solve_reduced(&prob, &cfg).unwrap();
        let expect = (-0.1f64).exp();
        for v in sol.final_values() {
            assert!((v / expect - 1.0).abs() < 1e-6);
        }
    }
}

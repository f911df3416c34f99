//! Quintic Hermite tabulation of a deflated value function on a log grid.

use crate::error::{domain, Result};
use crate::payoff::SegmentFn;
use rayon::prelude::*;

/// `u(x)` sampled with its first two derivatives on a uniform grid in
/// `xi = ln x`. Below the grid the function continues linearly through the
/// origin; above it stays flat.
#[derive(Debug, Clone)]
pub struct DeflatedValueFn {
    xi0: f64,
    h: f64,
    // (v, v_xi, v_xixi) in log coordinates
    nodes: Vec<[f64; 3]>,
}

impl DeflatedValueFn {
    /// Tabulates `eval(x) -> (u, u', u'')` at `n` nodes from `xi_lo` with step `h`.
    pub fn tabulate<F>(xi_lo: f64, h: f64, n: usize, eval: F) -> Result<Self>
    where
        F: Fn(f64) -> Result<(f64, f64, f64)> + Sync,
    {
        if n < 2 || !(h > 0.0) {
            return domain("a table needs at least two nodes and a positive step");
        }
        let nodes = (0..n)
            .into_par_iter()
            .map(|j| {
                let x = (xi_lo + h * j as f64).exp();
                let (u, d1, d2) = eval(x)?;
                Ok([u, x * d1, x * x * d2 + x * d1])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            xi0: xi_lo,
            h,
            nodes,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.xi0.exp()
    }

    pub fn x_max(&self) -> f64 {
        (self.xi0 + self.h * (self.nodes.len() - 1) as f64).exp()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `(u, u', u'')` at `x > 0`.
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        let n = self.nodes.len();
        let xi = x.ln();
        let pos = (xi - self.xi0) / self.h;
        if pos <= 0.0 {
            let slope = self.nodes[0][0] / self.x_min();
            return (slope * x, slope, 0.0);
        }
        if pos >= (n - 1) as f64 {
            return (self.nodes[n - 1][0], 0.0, 0.0);
        }
        let j = (pos.floor() as usize).min(n - 2);
        let t = pos - j as f64;
        let [v0, p0, q0] = self.nodes[j];
        let [v1, p1, q1] = self.nodes[j + 1];
        let h = self.h;
        let (t2, t3, t4, t5) = (t * t, t * t * t, t * t * t * t, t * t * t * t * t);
        let b = [
            1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
            t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
            0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
            0.5 * t3 - t4 + 0.5 * t5,
            -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
            10.0 * t3 - 15.0 * t4 + 6.0 * t5,
        ];
        let db = [
            -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
            1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
            t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
            1.5 * t2 - 4.0 * t3 + 2.5 * t4,
            -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
            30.0 * t2 - 60.0 * t3 + 30.0 * t4,
        ];
        let ddb = [
            -60.0 * t + 180.0 * t2 - 120.0 * t3,
            -36.0 * t + 96.0 * t2 - 60.0 * t3,
            1.0 - 9.0 * t + 18.0 * t2 - 10.0 * t3,
            3.0 * t - 12.0 * t2 + 10.0 * t3,
            -24.0 * t + 84.0 * t2 - 60.0 * t3,
            60.0 * t - 180.0 * t2 + 120.0 * t3,
        ];
        let c = [v0, h * p0, h * h * q0, h * h * q1, h * p1, v1];
        let dot = |w: &[f64; 6]| w.iter().zip(&c).map(|(a, b)| a * b).sum::<f64>();
        let v = dot(&b);
        let v_xi = dot(&db) / h;
        let v_xixi = dot(&ddb) / (h * h);
        (v, v_xi / x, (v_xixi - v_xi) / (x * x))
    }

    pub fn value(&self, x: f64) -> f64 {
        self.eval_all(x).0
    }

    pub fn upper_value(&self) -> f64 {
        self.nodes[self.nodes.len() - 1][0]
    }
}

/// `table(x) + offset` as a payoff segment.
#[derive(Debug, Clone)]
pub struct ShiftedTable {
    pub table: std::sync::Arc<DeflatedValueFn>,
    pub offset: f64,
}

impl SegmentFn for ShiftedTable {
    fn value(&self, x: f64) -> f64 {
        self.table.value(x) + self.offset
    }

    fn d1(&self, x: f64) -> Option<f64> {
        Some(self.table.eval_all(x).1)
    }

    fn d2(&self, x: f64) -> Option<f64> {
        Some(self.table.eval_all(x).2)
    }

    fn value_at_zero(&self) -> Option<f64> {
        Some(self.offset)
    }

    fn value_at_infinity(&self) -> Option<f64> {
        Some(self.table.upper_value() + self.offset)
    }

    fn slope_at_zero(&self) -> Option<f64> {
        Some(self.table.eval_all(self.table.x_min() * 0.5).1)
    }

    fn slope_at_infinity(&self) -> Option<f64> {
        Some(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_smooth_function() {
        let f = |x: f64| {
            (
                x / (1.0 + x),
                1.0 / (1.0 + x).powi(2),
                -2.0 / (1.0 + x).powi(3),
            )
        };
        let t = DeflatedValueFn::tabulate(-3.0, 0.05, 121, |x| Ok(f(x))).unwrap();
        for &x in &[0.06, 0.3, 1.0, 2.7, 15.0] {
            let (v, d1, d2) = t.eval_all(x);
            let (e, e1, e2) = f(x);
            assert!((v - e).abs() < 1e-10, "{x}");
            assert!((d1 - e1).abs() < 1e-8, "{x}");
            assert!((d2 - e2).abs() < 1e-6, "{x}");
        }
    }
}

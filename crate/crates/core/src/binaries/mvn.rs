//! Multivariate normal orthant probabilities `P(X_1 < a_1, ..., X_m < a_m)`.
//!
//! One dimension uses the normal CDF and two dimensions use Genz's port of the
//! Drezner-Wesolowsky bivariate algorithm. Up to a configurable dimension the
//! probability is reduced recursively by conditioning on the first coordinate
//! and integrating against its density; beyond that the separation-of-variables
//! transform is integrated with randomly shifted Richtmyer lattice rules.

use crate::error::{Error, Result};
use crate::math::normal::{cdf, inv_cdf, pdf};
use crate::math::quadrature::{gauss_legendre, integrate_panels, Tolerance};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Largest supported dimension.
pub const DIMENSION_CAP: usize = 12;

/// Upper limits and correlation matrix of a centred unit-variance normal vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MvnProblem {
    pub upper_limits: Vec<f64>,
    pub correlation: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnConfig {
    /// Target for three standard errors of the lattice estimate.
    pub abs_tol: f64,
    pub min_points: usize,
    pub max_points: usize,
    pub shifts: usize,
    pub seed: u64,
    /// Largest dimension evaluated by deterministic conditioning.
    pub deterministic_max_dim: usize,
}

impl MvnConfig {
    /// Whether an `m`-variate probability is evaluated without sampling error.
    pub fn is_deterministic(&self, m: usize) -> bool {
        m <= 2 || m <= self.deterministic_max_dim
    }
}

impl Default for MvnConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-7,
            min_points: 1 << 10,
            max_points: 1 << 20,
            shifts: 12,
            seed: 0x5eed_b1a7,
            deterministic_max_dim: 4,
        }
    }
}

/// Probability and its error estimate (zero for the deterministic branches).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MvnEstimate {
    pub value: f64,
    pub error: f64,
}

/// Evaluates the orthant probability. Infinite upper limits are handled by
/// dropping (`+inf`) or short-circuiting (`-inf`) the coordinate.
pub fn mvn_cdf(p: &MvnProblem, cfg: &MvnConfig) -> Result<MvnEstimate> {
    let m = p.upper_limits.len();
    if p.correlation.len() != m || p.correlation.iter().any(|row| row.len() != m) {
        return Err(Error::Domain(
            "correlation matrix does not match the limits".into(),
        ));
    }
    for i in 0..m {
        if (p.correlation[i][i] - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(
                "correlation matrix needs a unit diagonal".into(),
            ));
        }
        for j in 0..i {
            let (a, b) = (p.correlation[i][j], p.correlation[j][i]);
            if (a - b).abs() > 1e-12 || a.abs() > 1.0 + 1e-12 || a.is_nan() {
                return Err(Error::Domain(
                    "correlation matrix must be symmetric with entries in [-1, 1]".into(),
                ));
            }
        }
    }
    if p.upper_limits.iter().any(|a| a.is_nan()) {
        return Err(Error::Domain("NaN upper limit".into()));
    }
    if p.upper_limits.contains(&f64::NEG_INFINITY) {
        return Ok(MvnEstimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let keep: Vec<usize> = (0..m)
        .filter(|&i| p.upper_limits[i] != f64::INFINITY)
        .collect();
    let a: Vec<f64> = keep.iter().map(|&i| p.upper_limits[i]).collect();
    let r: Vec<Vec<f64>> = keep
        .iter()
        .map(|&i| keep.iter().map(|&j| p.correlation[i][j]).collect())
        .collect();
    match a.len() {
        0 => Ok(MvnEstimate {
            value: 1.0,
            error: 0.0,
        }),
        1 => Ok(MvnEstimate {
            value: cdf(a[0]),
            error: 0.0,
        }),
        2 => {
            let rho = r[0][1].clamp(-1.0, 1.0);
            Ok(MvnEstimate {
                value: bvn_cdf(a[0], a[1], rho),
                error: 0.0,
            })
        }
        n if n > DIMENSION_CAP => Err(Error::DimensionCap {
            order: n,
            cap: DIMENSION_CAP,
        }),
        m => {
            cholesky(&r)?;
            if cfg.is_deterministic(m) {
                Ok(MvnEstimate {
                    value: conditional_orthant(&a, &r)?.clamp(0.0, 1.0),
                    error: 0.0,
                })
            } else {
                let (a, l) = reorder(&a, &r)?;
                lattice_sov(&a, &l, cfg)
            }
        }
    }
}

/// Lower truncation of the conditioning coordinate.
const CONDITIONING_CUTOFF: f64 = 9.0;

/// `P(X < a)` as `int_{-inf}^{a_1} pdf(y) P(X_rest < a_rest | X_1 = y) dy`,
/// recursing until two coordinates remain.
fn conditional_orthant(a: &[f64], r: &[Vec<f64>]) -> Result<f64> {
    if a.contains(&f64::NEG_INFINITY) {
        return Ok(0.0);
    }
    let keep: Vec<usize> = (0..a.len()).filter(|&i| a[i] != f64::INFINITY).collect();
    match keep.len() {
        0 => return Ok(1.0),
        1 => return Ok(cdf(a[keep[0]])),
        2 => {
            let (i, j) = (keep[0], keep[1]);
            return Ok(bvn_cdf(a[i], a[j], r[i][j].clamp(-1.0, 1.0)));
        }
        _ => {}
    }
    let first = keep[0];
    let (mut lo, mut hi) = (-CONDITIONING_CUTOFF, a[first]);
    let mut rest = Vec::new();
    for &j in &keep[1..] {
        let c = r[first][j];
        if 1.0 - c * c <= 1e-14 {
            // X_j = sign(c) X_1
            if c > 0.0 {
                hi = hi.min(a[j]);
            } else {
                lo = lo.max(-a[j]);
            }
        } else {
            rest.push(j);
        }
    }
    if hi <= lo {
        return Ok(0.0);
    }
    let sd: Vec<f64> = rest
        .iter()
        .map(|&j| (1.0 - r[first][j] * r[first][j]).sqrt())
        .collect();
    let rc: Vec<Vec<f64>> = (0..rest.len())
        .map(|p| {
            (0..rest.len())
                .map(|q| {
                    if p == q {
                        1.0
                    } else {
                        let (i, j) = (rest[p], rest[q]);
                        ((r[i][j] - r[first][i] * r[first][j]) / (sd[p] * sd[q])).clamp(-1.0, 1.0)
                    }
                })
                .collect()
        })
        .collect();
    let mut lim = vec![0.0; rest.len()];
    integrate_panels(
        |y| {
            for (p, &j) in rest.iter().enumerate() {
                lim[p] = (a[j] - r[first][j] * y) / sd[p];
            }
            Ok(pdf(y) * conditional_orthant(&lim, &rc)?)
        },
        &[lo, hi],
        Tolerance::new(1e-13, 1e-11),
    )
}

/// `P(X < a, Y < b)` for standard normals with correlation `rho`.
pub fn bvn_cdf(a: f64, b: f64, rho: f64) -> f64 {
    if a == f64::NEG_INFINITY || b == f64::NEG_INFINITY {
        return 0.0;
    }
    if a == f64::INFINITY {
        return cdf(b);
    }
    if b == f64::INFINITY {
        return cdf(a);
    }
    bvnu(-a, -b, rho).clamp(0.0, 1.0)
}

struct GlHalf {
    x: Vec<f64>,
    w: Vec<f64>,
}

fn gl_half(n: usize) -> GlHalf {
    let (x, w) = gauss_legendre(n);
    let (x, w): (Vec<f64>, Vec<f64>) = x.into_iter().zip(w).filter(|(xi, _)| *xi < 0.0).unzip();
    GlHalf { x, w }
}

fn gl_tables() -> &'static [GlHalf; 3] {
    static T: OnceLock<[GlHalf; 3]> = OnceLock::new();
    T.get_or_init(|| [gl_half(6), gl_half(12), gl_half(20)])
}

/// Upper orthant `P(X > dh, Y > dk)` (Genz, "Numerical computation of
/// rectangular bivariate and trivariate normal and t probabilities", 2004).
fn bvnu(dh: f64, dk: f64, r: f64) -> f64 {
    let two_pi = 2.0 * PI;
    if r == 0.0 {
        return cdf(-dh) * cdf(-dk);
    }
    let tables = gl_tables();
    let g = if r.abs() < 0.3 {
        &tables[0]
    } else if r.abs() < 0.75 {
        &tables[1]
    } else {
        &tables[2]
    };
    let h = dh;
    let mut k = dk;
    let mut hk = h * k;
    let mut bvn = 0.0;
    if r.abs() < 0.925 {
        let hs = (h * h + k * k) / 2.0;
        let asr = r.asin();
        for (xi, wi) in g.x.iter().zip(&g.w) {
            let sn = (asr * (1.0 + xi) / 2.0).sin();
            bvn += wi * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            let sn = (asr * (1.0 - xi) / 2.0).sin();
            bvn += wi * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
        }
        return bvn * asr / (2.0 * two_pi) + cdf(-h) * cdf(-k);
    }
    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    if r.abs() < 1.0 {
        let as_ = (1.0 - r) * (1.0 + r);
        let mut a = as_.sqrt();
        let bs = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        bvn = a
            * (-(bs / as_ + hk) / 2.0).exp()
            * (1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0);
        if hk > -160.0 {
            let b = bs.sqrt();
            bvn -= (-hk / 2.0).exp()
                * two_pi.sqrt()
                * cdf(-b / a)
                * b
                * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (xi, wi) in g.x.iter().zip(&g.w) {
            for is in [-1.0, 1.0] {
                let xs = (a * (is * xi + 1.0)).powi(2);
                let rs = (1.0 - xs).sqrt();
                let asr = -(bs / xs + hk) / 2.0;
                if asr > -100.0 {
                    let sp = 1.0 + c * xs * (1.0 + d * xs);
                    let ep = (-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs;
                    bvn += a * wi * asr.exp() * (ep - sp);
                }
            }
        }
        bvn = -bvn / two_pi;
    }
    if r > 0.0 {
        bvn + cdf(-h.max(k))
    } else {
        -bvn + (cdf(-h) - cdf(-k)).max(0.0)
    }
}

/// Lower triangular factor with tolerance for singular (but PSD) matrices.
pub fn cholesky(r: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = r.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = r[i][i] - s;
                if d < -1e-10 {
                    return Err(Error::NotPositiveSemiDefinite);
                }
                l[i][i] = d.max(0.0).sqrt();
            } else if l[j][j] > 1e-14 {
                l[i][j] = (r[i][j] - s) / l[j][j];
            } else {
                l[i][j] = 0.0;
            }
        }
    }
    Ok(l)
}

/// Pivoted Cholesky factor that integrates the least likely coordinate first,
/// conditioning each later pivot on the truncated means of the earlier ones.
fn reorder(a: &[f64], r: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = a.len();
    let mut a = a.to_vec();
    let mut c: Vec<Vec<f64>> = r.to_vec();
    let mut l = vec![vec![0.0; m]; m];
    let mut y = vec![0.0; m];
    for i in 0..m {
        let mut best = (i, f64::INFINITY);
        for j in i..m {
            let var = c[j][j] - (0..i).map(|k| l[j][k] * l[j][k]).sum::<f64>();
            let mean: f64 = (0..i).map(|k| l[j][k] * y[k]).sum();
            let p = if var > 1e-14 {
                cdf((a[j] - mean) / var.sqrt())
            } else if a[j] >= mean {
                1.0
            } else {
                0.0
            };
            if p < best.1 {
                best = (j, p);
            }
        }
        let j = best.0;
        if j != i {
            a.swap(i, j);
            c.swap(i, j);
            for row in c.iter_mut() {
                row.swap(i, j);
            }
            l.swap(i, j);
        }
        let d = c[i][i] - (0..i).map(|k| l[i][k] * l[i][k]).sum::<f64>();
        if d < -1e-10 {
            return Err(Error::NotPositiveSemiDefinite);
        }
        l[i][i] = d.max(0.0).sqrt();
        for j in i + 1..m {
            l[j][i] = if l[i][i] > 1e-14 {
                (c[j][i] - (0..i).map(|k| l[j][k] * l[i][k]).sum::<f64>()) / l[i][i]
            } else {
                0.0
            };
        }
        let mean: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = if l[i][i] > 1e-14 {
            let t = (a[i] - mean) / l[i][i];
            let p = cdf(t);
            if p > 1e-300 {
                -pdf(t) / p
            } else {
                t
            }
        } else {
            0.0
        };
    }
    Ok((a, l))
}

const PRIMES: [f64; DIMENSION_CAP] = [
    2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0, 23.0, 29.0, 31.0, 37.0,
];

/// Separation-of-variables integrand at lattice point `w` (length m - 1).
fn sov_integrand(a: &[f64], l: &[Vec<f64>], w: &[f64], y: &mut [f64]) -> f64 {
    let m = a.len();
    let mut prod = 1.0;
    for i in 0..m {
        let s: f64 = (0..i).map(|j| l[i][j] * y[j]).sum();
        let e = if l[i][i] > 1e-12 {
            cdf((a[i] - s) / l[i][i])
        } else if a[i] >= s {
            1.0
        } else {
            0.0
        };
        prod *= e;
        if prod == 0.0 {
            return 0.0;
        }
        if i + 1 < m {
            let u = (w[i] * e).clamp(1e-300, 1.0 - 1e-16);
            y[i] = inv_cdf(u);
        }
    }
    prod
}

fn lattice_sov(a: &[f64], l: &[Vec<f64>], cfg: &MvnConfig) -> Result<MvnEstimate> {
    let m = a.len();
    let dim = m - 1;
    let q: Vec<f64> = PRIMES[..dim].iter().map(|p| p.sqrt().fract()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let shifts: Vec<Vec<f64>> = (0..cfg.shifts.max(2))
        .map(|_| (0..dim).map(|_| rng.gen::<f64>()).collect())
        .collect();
    let mut n = cfg.min_points.max(16);
    let mut w = vec![0.0; dim];
    let mut y = vec![0.0; m];
    loop {
        let mut means = Vec::with_capacity(shifts.len());
        for shift in &shifts {
            let mut sum = 0.0;
            for k in 1..=n {
                for d in 0..dim {
                    let v = (k as f64 * q[d] + shift[d]).fract();
                    // baker's (tent) transform
                    w[d] = 1.0 - (2.0 * v - 1.0).abs();
                }
                sum += sov_integrand(a, l, &w, &mut y);
            }
            means.push(sum / n as f64);
        }
        let ns = means.len() as f64;
        let mean = means.iter().sum::<f64>() / ns;
        let var = means.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (ns - 1.0);
        let err = 3.0 * (var / ns).sqrt();
        if err <= cfg.abs_tol {
            return Ok(MvnEstimate {
                value: mean.clamp(0.0, 1.0),
                error: err,
            });
        }
        if 2 * n > cfg.max_points {
            return Err(Error::MvnTolerance {
                achieved: err,
                target: cfg.abs_tol,
            });
        }
        n *= 2;
    }
}

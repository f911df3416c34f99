//! Gauss-Legendre and adaptive Gauss-Kronrod quadrature.

use crate::error::{Error, Result};
use std::sync::OnceLock;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1], computed by
/// Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Cached Gauss-Legendre rule.
pub fn gl_rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static GL8: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL16: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL32: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        8 => GL8.get_or_init(|| gauss_legendre(8)),
        16 => GL16.get_or_init(|| gauss_legendre(16)),
        32 => GL32.get_or_init(|| gauss_legendre(32)),
        _ => panic!("no cached Gauss-Legendre rule with {n} points"),
    }
}

/// Fixed n-point Gauss-Legendre integral of `f` over [a, b].
pub fn gl_fixed(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gl_rule(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut s = 0.0;
    for (xi, wi) in x.iter().zip(w) {
        s += wi * f(c + h * xi);
    }
    s * h
}

// Gauss-Kronrod 10/21 abscissae and weights (QUADPACK qk21).
const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One Gauss-Kronrod 21 panel: returns (integral, error estimate).
fn gk21<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut resk = fc * WGK21[10];
    let mut resg = 0.0;
    for j in 0..10 {
        let dx = h * XGK21[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        resk += WGK21[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG10[j / 2] * (f1 + f2);
        }
    }
    Ok((resk * h, ((resk - resg) * h).abs()))
}

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_depth: u32,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            max_depth: 40,
        }
    }
}

/// Adaptive Gauss-Kronrod (10/21) integration of a fallible integrand over the
/// panels delimited by `knots` (sorted, first and last are the limits).
pub fn integrate_panels<F>(mut f: F, knots: &[f64], tol: Tolerance) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut total = 0.0;
    let mut err = 0.0;
    if knots.len() < 2 {
        return Ok(0.0);
    }
    let span = (knots[knots.len() - 1] - knots[0]).abs();
    if span == 0.0 {
        return Ok(0.0);
    }
    let mut stack: Vec<(f64, f64, f64, f64, u32)> = Vec::with_capacity(64);
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let (v, e) = gk21(&mut f, a, b)?;
        stack.push((a, b, v, e, 0));
    }
    // Depth-first refinement; each panel receives a share of the absolute
    // tolerance proportional to its width.
    let mut scale = stack.iter().map(|p| p.2.abs()).sum::<f64>();
    while let Some((a, b, v, e, depth)) = stack.pop() {
        let local = (tol.abs.max(tol.rel * scale)) * ((b - a) / span).max(1e-3);
        if e <= local || (b - a) < 1e-15 * (1.0 + a.abs()) {
            total += v;
            err += e;
            continue;
        }
        if depth >= tol.max_depth {
            return Err(Error::Quadrature {
                achieved: e,
                target: local,
            });
        }
        let m = 0.5 * (a + b);
        let (v1, e1) = gk21(&mut f, a, m)?;
        let (v2, e2) = gk21(&mut f, m, b)?;
        scale += (v1.abs() + v2.abs() - v.abs()).max(0.0);
        stack.push((a, m, v1, e1, depth + 1));
        stack.push((m, b, v2, e2, depth + 1));
    }
    let _ = err;
    Ok(total)
}

/// Adaptive integration of an infallible integrand over [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, tol).map(|v| -v);
    }
    integrate_panels(|x| Ok(f(x)), &[a, b], tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        for n in [1usize, 2, 5, 8, 16, 32] {
            let (x, w) = gauss_legendre(n);
            let sw: f64 = w.iter().sum();
            assert!((sw - 2.0).abs() < 1e-13, "n = {n}");
            // exact up to degree 2n - 1
            let deg = 2 * n - 2;
            let s: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * xi.powi(deg as i32))
                .sum();
            assert!((s - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn adaptive_handles_sqrt_singularity() {
        let v = integrate(|x| x.sqrt(), 0.0, 1.0, Tolerance::new(1e-12, 1e-12)).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn knots_split_discontinuities() {
        let f = |x: f64| Ok(if x > 0.3 { 1.0 } else { 0.0 });
        let v = integrate_panels(f, &[0.0, 0.3, 1.0], Tolerance::new(1e-14, 0.0)).unwrap();
        assert!((v - 0.7).abs() < 1e-14);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let tol = Tolerance {
            abs: 1e-300,
            rel: 0.0,
            max_depth: 3,
        };
        let r = integrate(|x| if x > 0.123_456 { 1.0 } else { 0.0 }, 0.0, 1.0, tol);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}

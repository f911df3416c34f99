//! Standard normal density, distribution and quantile functions.

use libm::erfc;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

/// 1/sqrt(2*pi)
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF, accurate in both tails.
#[inline]
pub fn cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * erfc(-x * FRAC_1_SQRT_2)
    }
}

/// Upper tail 1 - cdf(x).
#[inline]
pub fn sf(x: f64) -> f64 {
    cdf(-x)
}

/// P(a < Y < b) for standard normal Y, evaluated on the side that avoids cancellation.
#[inline]
pub fn interval(a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    if a > 0.0 {
        sf(a) - sf(b)
    } else {
        cdf(b) - cdf(a)
    }
}

/// Quantile function of the standard normal distribution.
#[inline]
pub fn inv_cdf(p: f64) -> f64 {
    if p <= 0.0 {
        f64::NEG_INFINITY
    } else if p >= 1.0 {
        f64::INFINITY
    } else {
        let x = -SQRT_2 * erfc_inv(2.0 * p);
        // one Newton step against the accurate distribution function
        let d = pdf(x);
        if d > 0.0 {
            x - (cdf(x) - p) / d
        } else {
            x
        }
    }
}

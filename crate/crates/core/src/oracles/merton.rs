//! Zero coupon debt of a firm with lognormal assets under Vasicek rates, coded
//! from scratch with no use of the rest of the crate's numerics.

use crate::term_model::{AConvention, FirmParams, VasicekParams};

fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn vasicek_discount(p: &VasicekParams, r0: f64, tau: f64) -> f64 {
    let a = p.a2;
    let b = (1.0 - (-a * tau).exp()) / a;
    let drift = match p.convention {
        AConvention::Standard => p.a1,
        AConvention::Reversion => p.a2,
    };
    let s2 = p.s_r * p.s_r;
    let big_a = (drift / a - s2 / (2.0 * a * a)) * (b - tau) - s2 * b * b / (4.0 * a);
    (big_a - b * r0).exp()
}

/// Composite Simpson rule for the variance of `ln(V / Z)` accumulated over `[0, tau]`.
fn forward_variance(p: &VasicekParams, f: &FirmParams, tau: f64) -> f64 {
    let panels = 4096;
    let h = tau / panels as f64;
    let sigma2 = |s: f64| {
        let b = (1.0 - (-p.a2 * (tau - s)).exp()) / p.a2;
        f.s_v * f.s_v + 2.0 * f.rho * f.s_v * p.s_r * b + p.s_r * p.s_r * b * b
    };
    let mut sum = sigma2(0.0) + sigma2(tau);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * sigma2(k as f64 * h);
    }
    sum * h / 3.0
}

/// Value at time zero of debt promising `face` at `maturity`, paying
/// `recovery * V` when the firm value ends below the face.
pub fn merton_debt(
    face: f64,
    recovery: f64,
    maturity: f64,
    v0: f64,
    r0: f64,
    rates: &VasicekParams,
    firm: &FirmParams,
) -> f64 {
    let z0 = vasicek_discount(rates, r0, maturity);
    let s = forward_variance(rates, firm, maturity).sqrt();
    let d1 = ((v0 / (face * z0)).ln() + 0.5 * s * s) / s;
    let d2 = d1 - s;
    face * z0 * norm_cdf(d2) + recovery * v0 * norm_cdf(-d1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_rate_limit_is_black_scholes_debt() {
        // s_r = 0 and a1 = r a2 keeps the short rate at r forever
        let (r, a2, vol) = (0.04, 0.5, 0.25);
        let rates = VasicekParams::new(r * a2, a2, 0.0).unwrap();
        let firm = FirmParams::new(vol, 0.0, 0.0).unwrap();
        let (f, t, v) = (100.0f64, 2.0f64, 120.0f64);
        let s = vol * t.sqrt();
        let d1 = ((v / f).ln() + (r + 0.5 * vol * vol) * t) / s;
        let put = f * (-r * t).exp() * norm_cdf(s - d1) - v * norm_cdf(-d1);
        let expect = f * (-r * t).exp() - put;
        let got = merton_debt(f, 1.0, t, v, r, &rates, &firm);
        assert!((got / expect - 1.0).abs() < 1e-12, "{got} vs {expect}");
    }
}

//! Zero coupon bond prices and the volatility of the deflated firm value.

use bsbond::term_model::{effective_sigma, zcb_price, AConvention, FirmParams, VasicekParams};

fn main() -> bsbond::Result<()> {
    let rates = VasicekParams::new(0.02, 0.379, 0.077)?;
    let reversion = rates.with_convention(AConvention::Reversion);
    let firm = FirmParams::new(0.15, 0.05, 0.5)?;
    let r0 = 0.05;

    println!(
        "{:>5} {:>12} {:>12} {:>12}",
        "T", "Z standard", "Z reversion", "sigma(0,T)"
    );
    for maturity in [0.5, 1.0, 2.0, 5.0, 10.0] {
        println!(
            "{maturity:>5.1} {:>12.8} {:>12.8} {:>12.8}",
            zcb_price(&rates, r0, 0.0, maturity)?,
            zcb_price(&reversion, r0, 0.0, maturity)?,
            effective_sigma(&rates, &firm, 0.0, maturity)?
        );
    }
    Ok(())
}

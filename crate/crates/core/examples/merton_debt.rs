//! A single zero coupon bond without intensity or payout reduces to
//! Merton-type debt with stochastic rates.

use bsbond::coupon_bond::{compute_barriers, initial_price_formula, BondConfig, BondTermSheet};
use bsbond::oracles::merton_debt;
use bsbond::term_model::{FirmParams, VasicekParams};

fn main() -> bsbond::Result<()> {
    let rates = VasicekParams::new(0.03, 0.379, 0.077)?;
    let firm = FirmParams::new(0.2, 0.0, -0.3)?;
    let sheet = BondTermSheet::new(1.0, vec![0.0], vec![5.0], 0.6, 0.0, firm, rates)?;
    let cfg = BondConfig::default();
    let barriers = compute_barriers(&sheet, &cfg)?;
    for (v0, r0) in [(0.8, 0.01), (1.4, 0.03), (3.0, 0.08)] {
        let ours = initial_price_formula(&sheet, &barriers, v0, r0, &cfg)?;
        let merton = merton_debt(1.0, 0.6, 5.0, v0, r0, &rates, &firm);
        println!("V0 = {v0}, r0 = {r0}: {ours:.12} vs {merton:.12}");
    }
    Ok(())
}

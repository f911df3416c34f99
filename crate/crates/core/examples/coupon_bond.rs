//! A two coupon defaultable bond priced by backward recursion, by the
//! binary representation and by the explicit initial price formula.

use bsbond::coupon_bond::{
    initial_price_formula, price_closed_form, BondConfig, BondTermSheet, RecursiveSolution,
};
use bsbond::term_model::{FirmParams, VasicekParams};

fn main() -> bsbond::Result<()> {
    let sheet = BondTermSheet::new(
        1.0,
        vec![0.06, 0.06],
        vec![1.0, 2.0],
        0.8,
        0.1,
        FirmParams::new(0.15, 0.05, 0.5)?,
        VasicekParams::new(0.02, 0.379, 0.077)?,
    )?;
    let cfg = BondConfig::default();
    let sol = RecursiveSolution::build(&sheet, &cfg)?;
    let barriers = sol.barrier_set()?;
    println!("barriers {:?}", barriers.barriers);

    let r0 = 0.05;
    for v0 in [0.8, 1.2, 1.5, 2.5] {
        let rec = sol.price(v0, r0, 0.0)?;
        let cf = price_closed_form(&sheet, &barriers, v0, r0, 0.0, &cfg)?;
        let ip = initial_price_formula(&sheet, &barriers, v0, r0, &cfg)?;
        println!("V0 = {v0:3.1}: recursive {rec:.10}  binaries {cf:.10}  formula {ip:.10}");
    }

    // between coupon dates only the remaining cash flows matter
    println!("at t = 1.5, V = 1.4: {:.10}", sol.price(1.4, r0, 1.5)?);
    Ok(())
}

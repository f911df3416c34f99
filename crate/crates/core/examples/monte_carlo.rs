//! Simulated bond cash flows against the binary representation.

use bsbond::coupon_bond::{price_closed_form, BondConfig, BondTermSheet, RecursiveSolution};
use bsbond::oracles::{mc_bond_price, mc_bond_price_with_rule, DefaultRule, McConfig};
use bsbond::term_model::{FirmParams, VasicekParams};

fn main() -> bsbond::Result<()> {
    let sheet = BondTermSheet::new(
        1.0,
        vec![0.06, 0.06, 0.06],
        vec![1.0, 2.0, 3.0],
        0.8,
        0.1,
        FirmParams::new(0.15, 0.05, 0.5)?,
        VasicekParams::new(0.02, 0.379, 0.077)?,
    )?;
    let cfg = BondConfig::default();
    let sol = RecursiveSolution::build(&sheet, &cfg)?;
    let barriers = sol.barrier_set()?;
    let (v0, r0) = (1.5, 0.05);

    let exact = price_closed_form(&sheet, &barriers, v0, r0, 0.0, &cfg)?;
    let mc_cfg = McConfig {
        paths: 200_000,
        antithetic: true,
        ..McConfig::default()
    };
    let by_barrier = mc_bond_price(&sheet, v0, r0, &barriers, &mc_cfg)?;
    let by_value =
        mc_bond_price_with_rule(&sheet, v0, r0, DefaultRule::ValueFunction(&sol), &mc_cfg)?;
    println!("closed form         {exact:.6}");
    for (name, est) in [("barrier rule", by_barrier), ("value rule", by_value)] {
        println!(
            "{name:<19} {:.6} +- {:.6} ({:.2} s.e. off)",
            est.price,
            est.std_error,
            (est.price - exact) / est.std_error
        );
    }
    Ok(())
}

//! With no recovery and almost no volatility the barrier equation at the
//! first coupon date has three roots, and pricing is refused.

use bsbond::coupon_bond::{compute_barriers, BondConfig, BondTermSheet};
use bsbond::term_model::{FirmParams, VasicekParams};
use bsbond::Error;

fn main() -> bsbond::Result<()> {
    let sheet = BondTermSheet::new(
        1.0,
        vec![0.3, 0.0],
        vec![1.0, 2.0],
        0.0,
        0.0,
        FirmParams::new(0.02, 0.0, 0.0)?,
        VasicekParams::flat_zero(),
    )?;
    match compute_barriers(&sheet, &BondConfig::default()) {
        Err(Error::MultipleRoots {
            date_index, roots, ..
        }) => {
            println!("date {date_index}: roots near {roots:?}");
        }
        other => println!("unexpected outcome {other:?}"),
    }
    Ok(())
}

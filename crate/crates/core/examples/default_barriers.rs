//! Endogenous default barriers and the diagnostics behind them.

use bsbond::coupon_bond::{
    check_uniqueness_conditions, compute_barriers, BondConfig, BondTermSheet,
};
use bsbond::term_model::{FirmParams, VasicekParams};

fn main() -> bsbond::Result<()> {
    let sheet = BondTermSheet::new(
        1.0,
        vec![0.05, 0.0, 0.05, 0.05],
        vec![0.5, 1.0, 1.5, 2.0],
        0.5,
        0.05,
        FirmParams::new(0.2, 0.03, 0.3)?,
        VasicekParams::new(0.03, 0.5, 0.02)?,
    )?;
    let cfg = BondConfig::default();
    let set = compute_barriers(&sheet, &cfg)?;
    for (i, k) in set.barriers.iter().enumerate() {
        println!("K_{} = {k:.8} (c_bar {:.2})", i + 1, sheet.c_bar(i + 1));
    }
    for ev in &set.evidence {
        println!(
            "date {}: scan of {} points saw {} sign change(s), residual {:.1e}",
            ev.date_index, ev.scan_points, ev.sign_changes, ev.residual
        );
    }
    for rep in check_uniqueness_conditions(&sheet, &cfg, None)? {
        println!(
            "date {}: d = {:.4}, required {:.4}, sufficient {}, slope-one test {:?}",
            rep.date_index, rep.d, rep.required, rep.sufficient_ok, rep.empirical_unique
        );
    }
    Ok(())
}

//! Crank-Nicolson with a Rannacher start on the last coupon interval,
//! compared node by node with the kernel solution.

use bsbond::bs_engine::solve_value;
use bsbond::coupon_bond::{reduce_to_1d, BondConfig, BondTermSheet};
use bsbond::oracles::{fd_solve_reduced, FdConfig};
use bsbond::term_model::{FirmParams, VasicekParams};

fn main() -> bsbond::Result<()> {
    let sheet = BondTermSheet::new(
        1.0,
        vec![0.3, 0.3, 0.3],
        vec![1.0, 2.0, 3.0],
        0.8,
        0.1,
        FirmParams::new(0.15, 0.05, 0.5)?,
        VasicekParams::new(0.02, 0.379, 0.077)?,
    )?;
    let cfg = BondConfig::default();
    let prob = reduce_to_1d(&sheet, 2, &cfg)?;
    let fd = fd_solve_reduced(
        &prob,
        &FdConfig {
            t_end: 2.0,
            ..FdConfig::default()
        },
    )?;

    println!("{:>8} {:>14} {:>14} {:>10}", "x", "grid", "kernel", "rel");
    for x in [0.6, 0.9, 1.2, 1.3, 1.4, 1.8, 2.5] {
        let grid = fd.value(x, 2.0)?;
        let kernel = solve_value(&prob, x, 2.0, &cfg.quad)?;
        println!(
            "{x:>8.2} {grid:>14.9} {kernel:>14.9} {:>10.1e}",
            grid / kernel - 1.0
        );
    }
    Ok(())
}

//! Second and third order binaries: payments conditional on the underlying
//! being above or below a strike at each of several dates.

use bsbond::binaries::{binary_price, BinaryKind, BinaryModel, BinarySpec, MvnConfig, Sign};

fn main() -> bsbond::Result<()> {
    let model = BinaryModel::constant_vol(0.03, 0.01, 0.25);
    let cfg = MvnConfig::default();
    let x = 1.0;

    let cases = [
        (
            BinaryKind::Bond,
            vec![Sign::Plus, Sign::Plus],
            vec![0.9, 1.0],
            vec![1.0, 2.0],
        ),
        (
            BinaryKind::Bond,
            vec![Sign::Plus, Sign::Minus],
            vec![0.9, 1.0],
            vec![1.0, 2.0],
        ),
        (
            BinaryKind::Asset,
            vec![Sign::Plus, Sign::Plus],
            vec![0.9, 1.0],
            vec![1.0, 2.0],
        ),
        (
            BinaryKind::Asset,
            vec![Sign::Plus, Sign::Plus, Sign::Minus],
            vec![0.8, 0.9, 1.1],
            vec![1.0, 2.0, 3.0],
        ),
    ];
    for (kind, signs, strikes, expiries) in cases {
        let label = format!("{kind:?} {signs:?} K={strikes:?} T={expiries:?}");
        let spec = BinarySpec::new(kind, signs, strikes, expiries)?;
        println!(
            "{label:<70} {:.10}",
            binary_price(&model, &spec, x, 0.0, &cfg)?
        );
    }
    Ok(())
}

//! Reads a TOML term sheet, prices it and prints the JSON report.

use bsbond::cli::{parse_sheet, price_report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/sheets/two_coupon.toml").to_string()
    });
    let text = std::fs::read_to_string(&path)?;
    let parsed = parse_sheet(&text, true).map_err(|e| e.to_string())?;
    let input = parsed.file.to_input(None).map_err(|e| e.to_string())?;
    let report = price_report(&input, 0.0, input.v0, input.r0)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

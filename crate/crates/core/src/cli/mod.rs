//! Command line front end: term sheet ingestion and the `price`, `curve`,
//! `barriers` and `verify` commands.
//!
//! Exit codes are 0 on success, 2 for invalid input, 3 for numerical failure
//! (multiple barrier roots, quadrature or integrator tolerance) and 4 when a
//! verification check fails.

mod report;
mod sheet;

pub use report::{
    barrier_report, barrier_rows, closed_form_practical, curve_rows, fd_cross_check, price_report,
    verify_report, write_barrier_csv, write_curve_csv, write_price_csv, BarrierReport, BarrierRow,
    Check, CrossCheck, CurveRow, Grid, Level, Method, PriceReport, UniquenessRow, VerifyReport,
    BARRIER_HEADER, CURVE_HEADER, PRICE_HEADER,
};
pub use sheet::{
    env_profile, parse_sheet, BondSection, CouponEntry, FdSection, FirmSection, MarketSection,
    McSection, Numerics, NumericsSection, Parsed, PricingInput, Profile, SheetError, TermSheetFile,
    VasicekSection, PROFILE_ENV, SCHEMA_VERSION,
};

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_VERIFICATION: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "bsbond",
    version,
    about = "Defaultable coupon bond pricing under Vasicek rates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct SheetArgs {
    /// Term sheet file (TOML).
    pub sheet: PathBuf,
    /// Warn about unknown keys instead of rejecting the sheet.
    #[arg(long)]
    pub lenient: bool,
    /// Print the sheet with every numerical setting resolved, then exit.
    #[arg(long)]
    pub dump_normalized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price the bond and list barriers and uniqueness diagnostics.
    Price {
        #[command(flatten)]
        sheet: SheetArgs,
        #[arg(long, default_value_t = 0.0)]
        at: f64,
        /// Defaults to V0 from the sheet.
        #[arg(long)]
        firm_value: Option<f64>,
        /// Defaults to r0 from the sheet.
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        output: Format,
    },
    /// Price and deflated value derivatives over a firm value grid, as CSV.
    Curve {
        #[command(flatten)]
        sheet: SheetArgs,
        /// `lo:hi:n`; defaults to `V0/4:4V0:101`.
        #[arg(long)]
        grid: Option<String>,
        /// Geometric instead of uniform spacing.
        #[arg(long)]
        log: bool,
        #[arg(long, default_value_t = 0.0)]
        at: f64,
        #[arg(long)]
        rate: Option<f64>,
    },
    /// Default barriers with root search evidence.
    Barriers {
        #[command(flatten)]
        sheet: SheetArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        output: Format,
    },
    /// Cross-check the pricers against the finite difference and Monte Carlo oracles.
    Verify {
        #[command(flatten)]
        sheet: SheetArgs,
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
    },
}

/// Maps a library error to its exit code.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Quadrature { .. }
        | Error::MvnTolerance { .. }
        | Error::NotPositiveSemiDefinite
        | Error::MultipleRoots { .. }
        | Error::NoRoot { .. }
        | Error::Unstable { .. } => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

enum Failure {
    Code(u8, String),
    Io(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Code(exit_code(&e), e.to_string())
    }
}

impl From<SheetError> for Failure {
    fn from(e: SheetError) -> Self {
        let code = match &e {
            SheetError::Invalid(inner) => exit_code(inner),
            _ => EXIT_INVALID,
        };
        Self::Code(code, e.to_string())
    }
}

fn json(out: &mut impl Write, value: &impl serde::Serialize) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn load(
    args: &SheetArgs,
    err: &mut impl Write,
) -> Result<(TermSheetFile, Option<Profile>), Failure> {
    let text = std::fs::read_to_string(&args.sheet).map_err(|e| {
        Failure::Code(
            EXIT_INVALID,
            format!("cannot read {}: {e}", args.sheet.display()),
        )
    })?;
    let parsed = parse_sheet(&text, !args.lenient)
        .map_err(|e| Failure::Code(EXIT_INVALID, format!("{}: {e}", args.sheet.display())))?;
    for key in &parsed.ignored {
        writeln!(err, "warning: ignoring unknown key {key}")?;
    }
    Ok((parsed.file, env_profile()?))
}

fn execute(cli: &Cli, out: &mut impl Write, err: &mut impl Write) -> Result<u8, Failure> {
    let args = match &cli.command {
        Command::Price { sheet, .. }
        | Command::Curve { sheet, .. }
        | Command::Barriers { sheet, .. }
        | Command::Verify { sheet, .. } => sheet,
    };
    let (file, profile) = load(args, err)?;
    if args.dump_normalized {
        out.write_all(file.normalized(profile)?.to_toml().as_bytes())?;
        return Ok(EXIT_OK);
    }
    let input = file.to_input(profile)?;
    match &cli.command {
        Command::Price {
            at,
            firm_value,
            rate,
            output,
            ..
        } => {
            let v = firm_value.unwrap_or(input.v0);
            let report = price_report(&input, *at, v, rate.unwrap_or(input.r0))?;
            match output {
                Format::Json => json(out, &report)?,
                Format::Csv => write_price_csv(out, &report)?,
            }
        }
        Command::Curve {
            grid,
            log,
            at,
            rate,
            ..
        } => {
            let mut g: Grid = match grid {
                Some(s) => s.parse()?,
                None => Grid {
                    lo: input.v0 / 4.0,
                    hi: 4.0 * input.v0,
                    n: 101,
                    log: false,
                },
            };
            g.log = *log;
            let rows = curve_rows(&input, &g, *at, rate.unwrap_or(input.r0))?;
            write_curve_csv(out, &rows)?;
        }
        Command::Barriers { output, .. } => {
            let report = barrier_report(&input)?;
            match output {
                Format::Json => json(out, &report)?,
                Format::Csv => write_barrier_csv(out, &report.barriers)?,
            }
        }
        Command::Verify { level, .. } => {
            let report = verify_report(&input, *level)?;
            json(out, &report)?;
            if !report.passed {
                return Ok(EXIT_VERIFICATION);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Runs a parsed command line, writing results to `out` and diagnostics to
/// `err`, and returns the exit code. Nothing is written to `out` on failure.
pub fn run(cli: &Cli, out: &mut impl Write, err: &mut impl Write) -> u8 {
    let mut buf = Vec::new();
    let code = match execute(cli, &mut buf, err) {
        Ok(code) => code,
        Err(Failure::Code(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            return code;
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID;
        }
    };
    if let Err(e) = out.write_all(&buf).and_then(|_| out.flush()) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_INVALID;
    }
    code
}

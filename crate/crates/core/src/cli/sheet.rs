//! Term sheet files: a TOML document with an explicit schema version.
//!
//! ```toml
//! schema_version = 1
//!
//! [vasicek]
//! a1 = 0.02
//! a2 = 0.379
//! s_r = 0.077
//! a_convention = "standard"
//!
//! [firm]
//! s_V = 0.15
//! b = 0.05
//! rho = 0.5
//! V0 = 1.5
//!
//! [market]
//! r0 = 0.05
//!
//! [bond]
//! face = 1.0
//! recovery_delta = 0.8
//! intensity_lambda = 0.1
//! coupons = [{ date = 1.0, amount = 0.06 }, { date = 2.0, amount = 0.06 }]
//!
//! [numerics]
//! profile = "standard"
//! ```
//!
//! Every `numerics` entry is optional and falls back to the profile, which is
//! taken from the file, then from `BSBOND_PROFILE`, then `standard`.

use serde::{Deserialize, Serialize};

use crate::binaries::MvnConfig;
use crate::bs_engine::QuadratureConfig;
use crate::coupon_bond::{BondConfig, BondTermSheet};
use crate::error::Error;
use crate::oracles::{FdConfig, McConfig};
use crate::term_model::{AConvention, FirmParams, VasicekParams};

pub const SCHEMA_VERSION: u32 = 1;
pub const PROFILE_ENV: &str = "BSBOND_PROFILE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermSheetFile {
    pub schema_version: u32,
    pub vasicek: VasicekSection,
    pub firm: FirmSection,
    pub market: MarketSection,
    pub bond: BondSection,
    #[serde(default)]
    pub numerics: NumericsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VasicekSection {
    pub a1: f64,
    pub a2: f64,
    pub s_r: f64,
    #[serde(default)]
    pub a_convention: AConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirmSection {
    #[serde(rename = "s_V", alias = "s_v")]
    pub s_v: f64,
    pub b: f64,
    pub rho: f64,
    #[serde(rename = "V0", alias = "v0")]
    pub v0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketSection {
    pub r0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BondSection {
    pub face: f64,
    pub recovery_delta: f64,
    pub intensity_lambda: f64,
    pub coupons: Vec<CouponEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouponEntry {
    pub date: f64,
    pub amount: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NumericsSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<Profile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mvn_abs_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_points: Option<usize>,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub fd: FdSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct McSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps_per_year: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub antithetic: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FdSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space_nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_x_span: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

/// Named sets of numerical settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Fast,
    #[default]
    Standard,
    Precise,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fast" => Ok(Self::Fast),
            "standard" => Ok(Self::Standard),
            "precise" => Ok(Self::Precise),
            other => Err(Error::Validation(format!(
                "unknown numerics profile {other:?} (expected fast, standard or precise)"
            ))),
        }
    }
}

/// Every numerical setting used by the commands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerics {
    pub profile: Profile,
    pub bond: BondConfig,
    pub mc: McConfig,
    pub fd: FdConfig,
}

impl Numerics {
    pub fn for_profile(profile: Profile) -> Self {
        let base = BondConfig::default();
        let (quad, mvn_tol, table_step) = match profile {
            Profile::Fast => ((1e-8, 1e-7), 2e-6, 0.04),
            Profile::Standard => (
                (base.quad.abs_tol, base.quad.rel_tol),
                base.mvn.abs_tol,
                base.table_step,
            ),
            Profile::Precise => ((1e-12, 1e-11), 1e-7, 0.01),
        };
        let (paths, steps, nodes) = match profile {
            Profile::Fast => (100_000, 100, 400),
            Profile::Standard => (1_000_000, 250, 800),
            Profile::Precise => (4_000_000, 500, 1600),
        };
        Self {
            profile,
            bond: BondConfig {
                quad: QuadratureConfig {
                    abs_tol: quad.0,
                    rel_tol: quad.1,
                    ..base.quad
                },
                mvn: MvnConfig {
                    abs_tol: mvn_tol,
                    ..base.mvn
                },
                table_step,
                ..base
            },
            mc: McConfig {
                paths,
                steps_per_year: steps,
                ..McConfig::default()
            },
            fd: FdConfig {
                space_nodes: nodes,
                time_steps: nodes,
                ..FdConfig::default()
            },
        }
    }
}

/// Validated contents of a term sheet file.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingInput {
    pub sheet: BondTermSheet,
    pub v0: f64,
    pub r0: f64,
    pub numerics: Numerics,
}

/// Failure to read a term sheet.
#[derive(Debug, Clone, PartialEq)]
pub enum SheetError {
    Syntax(String),
    UnknownKeys(Vec<String>),
    Invalid(Error),
}

impl std::fmt::Display for SheetError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Syntax(msg) => write!(f, "{}", msg.trim_end()),
            Self::UnknownKeys(keys) => write!(f, "unknown keys: {}", keys.join(", ")),
            Self::Invalid(e) => write!(f, "{e}"),
        }
    }
}

/// Parsed file together with the unknown keys that were skipped.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub file: TermSheetFile,
    pub ignored: Vec<String>,
}

/// Parses the TOML text. In strict mode any unknown key is an error.
pub fn parse_sheet(text: &str, strict: bool) -> Result<Parsed, SheetError> {
    let mut ignored = Vec::new();
    let de = toml::Deserializer::new(text);
    let file: TermSheetFile = serde_ignored::deserialize(de, |path| ignored.push(path.to_string()))
        .map_err(|e| SheetError::Syntax(e.to_string()))?;
    if strict && !ignored.is_empty() {
        return Err(SheetError::UnknownKeys(ignored));
    }
    Ok(Parsed { file, ignored })
}

fn field<T>(path: &str, r: crate::error::Result<T>) -> Result<T, SheetError> {
    r.map_err(|e| {
        let msg = match e {
            Error::Validation(m) | Error::Domain(m) => m,
            other => other.to_string(),
        };
        SheetError::Invalid(Error::Validation(format!("{path}: {msg}")))
    })
}

impl TermSheetFile {
    /// Builds the model, resolving numerics against `env_profile` when the
    /// file names no profile.
    pub fn to_input(&self, env_profile: Option<Profile>) -> Result<PricingInput, SheetError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(SheetError::Invalid(Error::Validation(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                self.schema_version
            ))));
        }
        let v = &self.vasicek;
        let rates = field("vasicek", VasicekParams::new(v.a1, v.a2, v.s_r))?
            .with_convention(v.a_convention);
        let f = &self.firm;
        let firm = field("firm", FirmParams::new(f.s_v, f.b, f.rho))?;
        if !(f.v0 > 0.0) || !f.v0.is_finite() {
            return Err(SheetError::Invalid(Error::Validation(format!(
                "firm.V0: firm value must be positive, got {}",
                f.v0
            ))));
        }
        if !self.market.r0.is_finite() {
            return Err(SheetError::Invalid(Error::Validation(
                "market.r0 must be finite".into(),
            )));
        }
        let b = &self.bond;
        let sheet = field(
            "bond",
            BondTermSheet::new(
                b.face,
                b.coupons.iter().map(|c| c.amount).collect(),
                b.coupons.iter().map(|c| c.date).collect(),
                b.recovery_delta,
                b.intensity_lambda,
                firm,
                rates,
            ),
        )?;
        let numerics = self.numerics.resolve(env_profile)?;
        Ok(PricingInput {
            sheet,
            v0: f.v0,
            r0: self.market.r0,
            numerics,
        })
    }

    /// Same sheet with every numerical setting written out.
    pub fn normalized(&self, env_profile: Option<Profile>) -> Result<Self, SheetError> {
        let n = self.numerics.resolve(env_profile)?;
        let mut out = self.clone();
        out.numerics = NumericsSection {
            profile: Some(n.profile),
            abs_tol: Some(n.bond.quad.abs_tol),
            rel_tol: Some(n.bond.quad.rel_tol),
            mvn_abs_tol: Some(n.bond.mvn.abs_tol),
            table_step: Some(n.bond.table_step),
            scan_points: Some(n.bond.scan_points),
            mc: McSection {
                paths: Some(n.mc.paths),
                steps_per_year: Some(n.mc.steps_per_year),
                seed: Some(n.mc.seed),
                antithetic: Some(n.mc.antithetic),
            },
            fd: FdSection {
                space_nodes: Some(n.fd.space_nodes),
                time_steps: Some(n.fd.time_steps),
                log_x_span: Some(n.fd.log_x_span),
                theta: Some(n.fd.theta),
            },
        };
        Ok(out)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("term sheet serializes")
    }
}

impl NumericsSection {
    fn resolve(&self, env_profile: Option<Profile>) -> Result<Numerics, SheetError> {
        let profile = self.profile.or(env_profile).unwrap_or_default();
        let mut n = Numerics::for_profile(profile);
        let q = &mut n.bond;
        q.quad.abs_tol = self.abs_tol.unwrap_or(q.quad.abs_tol);
        q.quad.rel_tol = self.rel_tol.unwrap_or(q.quad.rel_tol);
        q.mvn.abs_tol = self.mvn_abs_tol.unwrap_or(q.mvn.abs_tol);
        q.table_step = self.table_step.unwrap_or(q.table_step);
        q.scan_points = self.scan_points.unwrap_or(q.scan_points);
        let mc = &mut n.mc;
        mc.paths = self.mc.paths.unwrap_or(mc.paths);
        mc.steps_per_year = self.mc.steps_per_year.unwrap_or(mc.steps_per_year);
        mc.seed = self.mc.seed.unwrap_or(mc.seed);
        mc.antithetic = self.mc.antithetic.unwrap_or(mc.antithetic);
        let fd = &mut n.fd;
        fd.space_nodes = self.fd.space_nodes.unwrap_or(fd.space_nodes);
        fd.time_steps = self.fd.time_steps.unwrap_or(fd.time_steps);
        fd.log_x_span = self.fd.log_x_span.unwrap_or(fd.log_x_span);
        fd.theta = self.fd.theta.unwrap_or(fd.theta);

        let check = |path: &str, r: crate::error::Result<()>| field(path, r);
        check("numerics", n.bond.quad.validate())?;
        check("numerics.mc", n.mc.validate())?;
        check("numerics.fd", n.fd.validate())?;
        if !(n.bond.mvn.abs_tol > 0.0) || !(n.bond.table_step > 0.0) || n.bond.scan_points < 16 {
            return Err(SheetError::Invalid(Error::Validation(
                "numerics: mvn_abs_tol and table_step must be positive and scan_points at least 16"
                    .into(),
            )));
        }
        Ok(n)
    }
}

/// Profile named by `BSBOND_PROFILE`, if set.
pub fn env_profile() -> Result<Option<Profile>, SheetError> {
    match std::env::var(PROFILE_ENV) {
        Ok(s) if !s.trim().is_empty() => s.parse().map(Some).map_err(SheetError::Invalid),
        _ => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
schema_version = 1

[vasicek]
a1 = 0.02
a2 = 0.379
s_r = 0.077

[firm]
s_V = 0.15
b = 0.05
rho = 0.5
V0 = 1.5

[market]
r0 = 0.05

[bond]
face = 1.0
recovery_delta = 0.8
intensity_lambda = 0.1
coupons = [{ date = 1.0, amount = 0.06 }, { date = 2.0, amount = 0.06 }]
"#;

    #[test]
    fn sample_parses_with_defaults() {
        let p = parse_sheet(SAMPLE, true).unwrap();
        let input = p.file.to_input(None).unwrap();
        assert_eq!(input.sheet.n(), 2);
        assert_eq!(input.numerics, Numerics::for_profile(Profile::Standard));
        assert_eq!(input.sheet.rates.convention, AConvention::Standard);
    }

    #[test]
    fn unknown_key_is_rejected_in_strict_mode_only() {
        let text = SAMPLE.replace("r0 = 0.05", "r0 = 0.05\nspread = 1");
        match parse_sheet(&text, true) {
            Err(SheetError::UnknownKeys(k)) => assert_eq!(k, vec!["market.spread".to_string()]),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            parse_sheet(&text, false).unwrap().ignored,
            vec!["market.spread"]
        );
    }

    #[test]
    fn syntax_errors_name_the_line() {
        let text = SAMPLE.replace("a2 = 0.379", "a2 = = 0.379");
        let msg = parse_sheet(&text, true).unwrap_err().to_string();
        assert!(msg.contains("line 6"), "{msg}");
    }

    #[test]
    fn normalized_dump_round_trips() {
        let file = parse_sheet(SAMPLE, true).unwrap().file;
        let norm = file.normalized(Some(Profile::Fast)).unwrap();
        let again = parse_sheet(&norm.to_toml(), true).unwrap().file;
        assert_eq!(again, norm);
        assert_eq!(
            again.to_input(None).unwrap(),
            file.to_input(Some(Profile::Fast)).unwrap()
        );
    }

    #[test]
    fn profile_precedence() {
        let text = SAMPLE.to_string() + "\n[numerics]\nprofile = \"precise\"\n";
        let file = parse_sheet(&text, true).unwrap().file;
        assert_eq!(
            file.to_input(Some(Profile::Fast)).unwrap().numerics.profile,
            Profile::Precise
        );
        assert!("turbo".parse::<Profile>().is_err());
    }
}

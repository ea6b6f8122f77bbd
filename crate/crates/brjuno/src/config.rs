//! JSON run configuration and the short flag syntaxes that build it.

use std::str::FromStr;

use brjuno_core::arith::parse_rational;
use brjuno_core::brjuno::{BrjunoSpec, SignSpec};
use brjuno_core::inversion::Budgets;
use brjuno_core::map::{MapConstants, MapModel, Mobius};
use brjuno_core::weight::{Expr, WeightKind, WeightModel};
use brjuno_core::{Error, Rational};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

/// Rationals travel as strings (`"3/2"`, `"2"`), big integers likewise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapConfig {
    Gauss,
    AlphaCf {
        alpha: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n1: Option<u64>,
    },
    Custom {
        s0: String,
        s1: String,
        /// `[a, b, c, d]` of each inverse branch `y -> (a y + b)/(c y + d)`.
        branches: Vec<[String; 4]>,
        constants: ConstantsConfig,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantsConfig {
    pub kappa: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_g: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightConfig {
    LogPow { power: u32 },
    Inverse,
    Expr { expr: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignConfig {
    Constant,
    Alternating,
    Periodic { pattern: Vec<i8> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecConfig {
    pub map: MapConfig,
    pub weight: WeightConfig,
    /// Derivative constant `C` of the weight; fitted when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_c: Option<String>,
    pub nu: String,
    pub sign: SignConfig,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetConfig {
    pub search: u64,
    pub prec: i64,
    pub substeps: u32,
    pub pad: u64,
    pub seed: usize,
    pub scan: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub spec: SpecConfig,
    pub prec: i64,
    pub budgets: BudgetConfig,
    pub format: Format,
}

fn rational(s: &str) -> Result<Rational, Error> {
    parse_rational(s)
}

fn opt_rational(s: &Option<String>) -> Result<Option<Rational>, Error> {
    s.as_deref().map(rational).transpose()
}

fn bigint(s: &str) -> Result<BigInt, Error> {
    BigInt::from_str(s.trim()).map_err(|_| Error::Parse(format!("integer: {s}")))
}

impl MapConfig {
    pub fn build(&self) -> Result<MapModel, Error> {
        match self {
            MapConfig::Gauss => Ok(MapModel::gauss()),
            MapConfig::AlphaCf { alpha, n1 } => MapModel::alpha_cf(rational(alpha)?, *n1),
            MapConfig::Custom { s0, s1, branches, constants } => {
                let branches = branches
                    .iter()
                    .map(|[a, b, c, d]| Ok(Mobius::new(bigint(a)?, bigint(b)?, bigint(c)?, bigint(d)?)))
                    .collect::<Result<Vec<_>, Error>>()?;
                let constants = MapConstants {
                    kappa: constants.kappa,
                    tau: opt_rational(&constants.tau)?,
                    sigma: opt_rational(&constants.sigma)?,
                    d: opt_rational(&constants.d)?,
                    m_g: opt_rational(&constants.m_g)?,
                };
                MapModel::custom(rational(s0)?, rational(s1)?, branches, constants)
            }
        }
    }
}

impl SpecConfig {
    pub fn brjuno() -> SpecConfig {
        SpecConfig {
            map: MapConfig::Gauss,
            weight: WeightConfig::LogPow { power: 1 },
            weight_c: None,
            nu: "1".into(),
            sign: SignConfig::Constant,
        }
    }

    pub fn build(&self) -> Result<BrjunoSpec, Error> {
        let map = self.map.build()?;
        let kind = match &self.weight {
            WeightConfig::LogPow { power } => WeightKind::LogPow(*power),
            WeightConfig::Inverse => WeightKind::Inverse,
            WeightConfig::Expr { expr } => WeightKind::Custom(Expr::from_str(expr)?),
        };
        let mut weight = WeightModel::new(kind, &map)?;
        if let Some(c) = &self.weight_c {
            weight = weight.with_c(rational(c)?);
        }
        let sign = match &self.sign {
            SignConfig::Constant => SignSpec::Constant,
            SignConfig::Alternating => SignSpec::Alternating,
            SignConfig::Periodic { pattern } => SignSpec::Periodic(pattern.clone()),
        };
        BrjunoSpec::new(map, weight, rational(&self.nu)?, sign)
    }
}

impl Default for BudgetConfig {
    fn default() -> BudgetConfig {
        let b = Budgets::default();
        BudgetConfig {
            search: b.search_cap,
            prec: b.prec_cap,
            substeps: b.substeps,
            pad: b.pad_cap,
            seed: b.seed_cap,
            scan: b.scan_limit,
        }
    }
}

impl BudgetConfig {
    pub fn build(&self) -> Result<Budgets, Error> {
        if self.search == 0 || self.prec <= 0 || self.substeps == 0 || self.pad == 0 || self.seed == 0 || self.scan == 0 {
            return Err(Error::Domain("budgets must be positive".into()));
        }
        Ok(Budgets {
            search_cap: self.search,
            prec_cap: self.prec,
            substeps: self.substeps,
            pad_cap: self.pad,
            seed_cap: self.seed,
            scan_limit: self.scan,
        })
    }
}

/// `gauss` or `alpha_cf` (with `--alpha`).
pub fn parse_map(name: &str, alpha: Option<&str>) -> Result<MapConfig, Error> {
    match name {
        "gauss" => Ok(MapConfig::Gauss),
        "alpha_cf" | "alpha" => Ok(MapConfig::AlphaCf { alpha: alpha.unwrap_or("1/2").to_string(), n1: None }),
        other => Err(Error::Parse(format!("map {other:?}: expected gauss or alpha_cf (custom maps need --config)"))),
    }
}

/// `log_pow:n`, `inverse`, or `expr:<formula in x>`.
pub fn parse_weight(s: &str) -> Result<WeightConfig, Error> {
    if s == "inverse" {
        return Ok(WeightConfig::Inverse);
    }
    if let Some(n) = s.strip_prefix("log_pow:") {
        let power = n.parse().map_err(|_| Error::Parse(format!("weight power {n:?}")))?;
        return Ok(WeightConfig::LogPow { power });
    }
    if let Some(e) = s.strip_prefix("expr:") {
        Expr::from_str(e)?;
        return Ok(WeightConfig::Expr { expr: e.to_string() });
    }
    Err(Error::Parse(format!("weight {s:?}")))
}

/// `constant`, `alternating`, or `periodic:1,-1,...` (`+`/`-` also accepted).
pub fn parse_sign(s: &str) -> Result<SignConfig, Error> {
    match s {
        "constant" => Ok(SignConfig::Constant),
        "alternating" => Ok(SignConfig::Alternating),
        _ => {
            let body = s.strip_prefix("periodic:").ok_or_else(|| Error::Parse(format!("sign {s:?}")))?;
            let pattern = body
                .split(',')
                .map(|t| match t.trim() {
                    "+" | "1" | "+1" => Ok(1),
                    "-" | "-1" => Ok(-1),
                    other => Err(Error::Parse(format!("sign entry {other:?}"))),
                })
                .collect::<Result<Vec<i8>, _>>()?;
            Ok(SignConfig::Periodic { pattern })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags() {
        assert_eq!(parse_weight("log_pow:2").unwrap(), WeightConfig::LogPow { power: 2 });
        assert_eq!(parse_sign("periodic:+,-,-").unwrap(), SignConfig::Periodic { pattern: vec![1, -1, -1] });
        assert!(parse_map("tent", None).is_err());
        assert!(SpecConfig::brjuno().build().is_ok());
    }
}

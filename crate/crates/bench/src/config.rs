use std::fmt;
use std::str::FromStr;

use elasticity_core::fem::ElementPair;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, BenchResultT};
use crate::reference::NU_VALUES;

/// Highest level run without raising `max_level_guard`.
pub const DEFAULT_LEVEL_GUARD: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Markdown,
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> BenchResultT<Self> {
        match s.to_ascii_lowercase().as_str() {
            "md" | "markdown" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(BenchError::Config(format!("unknown format '{other}' (md, csv, json)"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Markdown => "md",
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(with = "pair_list")]
    pub pairs: Vec<ElementPair>,
    pub levels: Vec<u32>,
    pub nu_values: Vec<f64>,
    pub tolerance: f64,
    pub report_format: ReportFormat,
    pub seed: u64,
    pub max_level_guard: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            pairs: ElementPair::ALL.to_vec(),
            levels: vec![2, 3, 4, 5],
            nu_values: NU_VALUES.to_vec(),
            tolerance: 1e-6,
            report_format: ReportFormat::Markdown,
            seed: 0,
            max_level_guard: DEFAULT_LEVEL_GUARD,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> BenchResultT<()> {
        if self.pairs.is_empty() || self.levels.is_empty() || self.nu_values.is_empty() {
            return Err(BenchError::Config("pairs, levels and nu values must be non-empty".into()));
        }
        for &l in &self.levels {
            if l == 0 || l > self.max_level_guard {
                return Err(BenchError::Config(format!(
                    "level {l} outside 1..={} (raise --max-level-guard to run it)",
                    self.max_level_guard
                )));
            }
        }
        for &nu in &self.nu_values {
            if !(0.0..0.5).contains(&nu) {
                return Err(BenchError::Config(format!("nu = {nu} outside [0, 0.5)")));
            }
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(BenchError::Config(format!("tolerance {} outside (0, 1)", self.tolerance)));
        }
        Ok(())
    }
}

/// `"2..5"` (inclusive), `"2,3,4"` or `"3"`.
pub fn parse_levels(s: &str) -> BenchResultT<Vec<u32>> {
    let bad = || BenchError::Config(format!("cannot parse levels '{s}'"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

pub fn parse_nu_values(s: &str) -> BenchResultT<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| BenchError::Config(format!("cannot parse nu '{t}'"))))
        .collect()
}

/// `"all"` or a single pair name.
pub fn parse_pairs(s: &str) -> BenchResultT<Vec<ElementPair>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(ElementPair::ALL.to_vec());
    }
    s.split(',')
        .map(|t| t.trim().parse::<ElementPair>().map_err(|e| BenchError::Config(e.to_string())))
        .collect()
}

mod pair_list {
    use elasticity_core::fem::ElementPair;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(pairs: &[ElementPair], s: S) -> Result<S::Ok, S::Error> {
        pairs.iter().map(|p| p.slug()).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<ElementPair>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_syntax() {
        assert_eq!(parse_levels("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_levels("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_levels("4, 2").unwrap(), vec![4, 2]);
        assert!(parse_levels("5..2").is_err());
        assert!(parse_levels("x").is_err());
    }

    #[test]
    fn default_config_is_valid() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.pairs.len() * c.levels.len() * c.nu_values.len(), 40);
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = ExperimentConfig::default();
        c.nu_values = vec![0.5];
        assert_eq!(c.validate().unwrap_err().exit_code(), 2);
        let mut c = ExperimentConfig::default();
        c.levels = vec![6];
        assert!(c.validate().is_err());
        c.max_level_guard = 6;
        assert!(c.validate().is_ok());
        c.tolerance = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn pair_and_format_names() {
        assert_eq!(parse_pairs("all").unwrap().len(), 2);
        assert_eq!(parse_pairs("p2p1").unwrap(), vec![ElementPair::P2P1]);
        assert!(parse_pairs("p3p2").is_err());
        assert_eq!("md".parse::<ReportFormat>().unwrap(), ReportFormat::Markdown);
        assert!("xml".parse::<ReportFormat>().is_err());
    }
}

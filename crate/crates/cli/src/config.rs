//! Problem configuration, read from TOML.

use std::path::Path;

use quartic_core::coefficients::{Harmonic, PeriodicCoefficient, MAX_DEGREE};
use quartic_core::Precision;
use serde::Deserialize;
use thiserror::Error;

/// Largest index the CLI will solve for.
pub const MAX_INDEX: u32 = 64;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionName {
    #[default]
    Double,
    Extended,
}

impl From<PrecisionName> for Precision {
    fn from(p: PrecisionName) -> Self {
        match p {
            PrecisionName::Double => Precision::Double,
            PrecisionName::Extended => Precision::Extended,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicSpec {
    pub k: u32,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

/// `constant + Σ (a cos 2πkx + b sin 2πkx)`.
#[derive(Debug, Clone, PartialEq, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub harmonics: Vec<HarmonicSpec>,
}

impl CoefficientSpec {
    pub fn build(&self, name: &str) -> Result<PeriodicCoefficient, ConfigError> {
        let hs = self.harmonics.iter().map(|h| Harmonic { k: h.k, a: h.a, b: h.b }).collect();
        PeriodicCoefficient::new(self.constant, hs).map_err(|e| ConfigError::Invalid(format!("{name}: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub ode_tol: Option<f64>,
    #[serde(default = "default_z_tol")]
    pub z_abs_tol: f64,
}

fn default_z_tol() -> f64 {
    1e-11
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { ode_tol: None, z_abs_tol: default_z_tol() }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default)]
    pub p: CoefficientSpec,
    #[serde(default)]
    pub q: CoefficientSpec,
    pub n_range: [u32; 2],
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub precision: PrecisionName,
    pub threads: Option<usize>,
    #[serde(default)]
    pub output: OutputFormat,
}

impl ProblemConfig {
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: ProblemConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let [lo, hi] = self.n_range;
        if lo > hi {
            return Err(ConfigError::Invalid(format!("empty n_range [{lo}, {hi}]")));
        }
        if hi > MAX_INDEX {
            return Err(ConfigError::Invalid(format!("n_range upper bound {hi} exceeds {MAX_INDEX}")));
        }
        if let Some(t) = self.tolerances.ode_tol {
            let (a, b) = Precision::from(self.precision).tolerance_range();
            if !(a..=b).contains(&t) {
                return Err(ConfigError::Invalid(format!("ode_tol {t:e} outside [{a:e}, {b:e}]")));
            }
        }
        if !(self.tolerances.z_abs_tol > 0.0 && self.tolerances.z_abs_tol < 0.1) {
            return Err(ConfigError::Invalid("z_abs_tol must lie in (0, 0.1)".into()));
        }
        if self.threads == Some(0) {
            return Err(ConfigError::Invalid("threads must be positive".into()));
        }
        for (name, spec) in [("p", &self.p), ("q", &self.q)] {
            if let Some(h) = spec.harmonics.iter().find(|h| h.k == 0 || h.k > MAX_DEGREE) {
                return Err(ConfigError::Invalid(format!("{name}: harmonic index {} outside 1..={MAX_DEGREE}", h.k)));
            }
            spec.build(name)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let c = ProblemConfig::parse("n_range = [0, 5]\n").unwrap();
        assert_eq!(c.p, CoefficientSpec::default());
        assert_eq!(c.output, OutputFormat::Csv);
        assert_eq!(c.tolerances.z_abs_tol, 1e-11);
    }

    #[test]
    fn decimal_values_round_trip() {
        let c = ProblemConfig::parse("n_range = [1, 2]\n[p]\nconstant = 0.1\nharmonics = [{ k = 2, a = 0.30000000000000004, b = -1e-3 }]\n").unwrap();
        assert_eq!(c.p.constant, 0.1);
        assert_eq!(c.p.harmonics[0].a.to_string(), "0.30000000000000004");
        assert_eq!(c.p.harmonics[0].b, -0.001);
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            "n_range = [5, 2]",
            "n_range = [0, 65]",
            "n_range = [0, 3]\nthreads = 0",
            "n_range = [0, 3]\n[tolerances]\node_tol = 1e-3",
            "n_range = [0, 3]\n[p]\nharmonics = [{ k = 0, a = 1.0 }]",
            "n_range = [0, 3]\nbogus = 1",
            "n_range = [0, 3]\nprecision = \"quad\"",
        ] {
            assert!(ProblemConfig::parse(bad).is_err(), "{bad}");
        }
    }
}

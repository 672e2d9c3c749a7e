use std::fs;
use std::path::{Path, PathBuf};

use renewal_core::estimators::SchemeError;
use renewal_core::{LawError, LawSpec, RenewalLaw, SchemeConfig, SchemeKind, StartMode};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid law: {0}")]
    Law(#[from] LawError),
    #[error("invalid scheme parameters: {0}")]
    Scheme(#[from] SchemeError),
    #[error("{0}")]
    Invalid(String),
}

fn default_mode() -> StartMode {
    StartMode::Stationary
}

fn default_tolerances() -> Vec<f64> {
    vec![0.05, 0.1, 0.2]
}

/// A complete experiment description, as read from a JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub law: LawSpec,
    pub scheme: SchemeKind,
    #[serde(default)]
    pub params: SchemeConfig,
    /// Last path position `N`; paths cover `0..=N`.
    pub length: usize,
    #[serde(default = "default_mode")]
    pub mode: StartMode,
    pub replicates: usize,
    pub seed: u64,
    /// Explicit per-replicate seeds; derived from `seed` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicate_seeds: Option<Vec<u64>>,
    #[serde(default = "default_tolerances")]
    pub tolerances: Vec<f64>,
}

impl ExperimentConfig {
    pub fn new(law: LawSpec, scheme: SchemeKind, length: usize, replicates: usize, seed: u64) -> Self {
        ExperimentConfig {
            law,
            scheme,
            params: SchemeConfig::default(),
            length,
            mode: default_mode(),
            replicates,
            seed,
            replicate_seeds: None,
            tolerances: default_tolerances(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        Self::from_json(&read(path)?)
    }

    /// Seed of replicate `r`.
    pub fn replicate_seed(&self, r: usize) -> u64 {
        match &self.replicate_seeds {
            Some(seeds) => seeds[r],
            None => renewal_core::rng::derive_seed(self.seed, r as u64),
        }
    }

    /// Builds the law and checks every parameter; returns advisory warnings.
    pub fn validate(&self) -> Result<(RenewalLaw, Vec<String>), ConfigError> {
        if self.length < 1 {
            return Err(ConfigError::Invalid("length must be at least 1".into()));
        }
        if self.replicates < 1 {
            return Err(ConfigError::Invalid("replicates must be at least 1".into()));
        }
        if let Some(seeds) = &self.replicate_seeds {
            if seeds.len() != self.replicates {
                return Err(ConfigError::Invalid(format!(
                    "{} replicate seeds given for {} replicates",
                    seeds.len(),
                    self.replicates
                )));
            }
        }
        if let Some(t) = self.tolerances.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(ConfigError::Invalid(format!("tolerance {t} must be positive and finite")));
        }
        let law = self.law.build()?;
        let warnings = self.params.validate(self.scheme)?;
        Ok((law, warnings))
    }
}

/// Reads a law given inline as JSON or as a path to a JSON file.
pub fn parse_law(arg: &str) -> Result<LawSpec, ConfigError> {
    if arg.trim_start().starts_with('{') {
        Ok(serde_json::from_str(arg)?)
    } else {
        Ok(serde_json::from_str(&read(Path::new(arg))?)?)
    }
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = ExperimentConfig::from_json(
            r#"{"law":{"type":"geometric","q":0.5,"truncate":60},"scheme":"poly","length":100,"replicates":2,"seed":7}"#,
        )
        .unwrap();
        assert_eq!(c.mode, StartMode::Stationary);
        assert_eq!(c.params, SchemeConfig::default());
        assert_eq!(c.tolerances, default_tolerances());
        assert_ne!(c.replicate_seed(0), c.replicate_seed(1));
        assert!(c.validate().unwrap().1.is_empty());
    }

    #[test]
    fn unknown_fields_and_bad_values_are_rejected() {
        assert!(ExperimentConfig::from_json(
            r#"{"law":{"type":"explicit","p":[1]},"scheme":"poly","length":1,"replicates":1,"seed":0,"bogus":1}"#
        )
        .is_err());
        let mut c = ExperimentConfig::new(LawSpec::Explicit { p: vec![1.0] }, SchemeKind::Poly, 10, 1, 0);
        c.replicates = 0;
        assert!(matches!(c.validate(), Err(ConfigError::Invalid(_))));
        c.replicates = 1;
        c.params.gamma = 1.5;
        assert!(matches!(c.validate(), Err(ConfigError::Scheme(_))));
        c.params.gamma = 0.3;
        c.tolerances = vec![0.0];
        assert!(c.validate().is_err());
        c.tolerances = vec![0.1];
        c.law = LawSpec::Explicit { p: vec![] };
        assert!(matches!(c.validate(), Err(ConfigError::Law(_))));
    }

    #[test]
    fn alpha_violation_is_a_warning() {
        let mut c = ExperimentConfig::new(LawSpec::Explicit { p: vec![0.5, 0.5] }, SchemeKind::Poly, 10, 1, 0);
        c.params.gamma = 0.5;
        c.params.declared_alpha = Some(3.0);
        let (_, w) = c.validate().unwrap();
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn law_argument_forms() {
        assert!(matches!(parse_law(r#"{"type":"explicit","p":[0,0,1]}"#), Ok(LawSpec::Explicit { .. })));
        assert!(matches!(parse_law("/nonexistent/law.json"), Err(ConfigError::Io { .. })));
        assert!(matches!(parse_law("{not json"), Err(ConfigError::Json(_))));
    }
}

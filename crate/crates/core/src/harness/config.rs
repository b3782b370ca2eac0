//! Experiment configuration: a flat TOML document whose keys mirror the CLI
//! flags. Flags are merged over the file before deserialization, so both
//! sources go through the same validation and error messages.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::sieve::{AssociatesPolicy, Budget, FamilyKind, ModuliFamily, ModulusRange};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config error: {0}")]
    Parse(String),
    #[error("config error at `{key}`: {message}")]
    Invalid { key: &'static str, message: String },
}

impl ConfigError {
    fn invalid(key: &'static str, message: impl Into<String>) -> Self {
        ConfigError::Invalid {
            key,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyName {
    All,
    Squares,
    Power,
    SquareNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoeffName {
    AllOnes,
    Random,
    Extremal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeName {
    Full,
    Dyadic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssociatesName {
    Literal,
    Units,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub family: Vec<FamilyName>,
    /// Exponent of the `power` family and of the Weyl sums.
    pub k: u32,
    #[serde(rename = "Q")]
    pub q: Vec<u64>,
    #[serde(rename = "N")]
    pub n: Vec<f64>,
    pub seeds: Vec<u64>,
    pub coeffs: Vec<CoeffName>,
    pub range: RangeName,
    pub associates: AssociatesName,
    pub eps: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Tolerance of the Poisson-summation identities.
    pub tol: f64,
    pub tol_weyl: f64,
    pub tol_duality: f64,
    pub tol_transform: f64,
    pub tol_forms: f64,
    #[serde(rename = "Q0")]
    pub q0: Vec<f64>,
    pub matrices: u64,
    pub rows: usize,
    pub cols: usize,
    pub max_points: u64,
    pub max_terms: u64,
    pub max_cells: u64,
    pub timing: bool,
    /// A sweep CSV to summarize instead of running a fresh sweep.
    pub input: Option<String>,
    pub out: Option<String>,
    pub format: Format,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            family: vec![FamilyName::All, FamilyName::Squares, FamilyName::Power],
            k: 3,
            q: (2..=8).collect(),
            n: vec![4.0, 9.0, 16.0, 36.0, 64.0],
            seeds: (1..=5).collect(),
            coeffs: vec![CoeffName::AllOnes, CoeffName::Random, CoeffName::Extremal],
            range: RangeName::Full,
            associates: AssociatesName::Literal,
            eps: 0.0,
            c: 1.0,
            tol: 1e-10,
            tol_weyl: 1e-6,
            tol_duality: 1e-9,
            tol_transform: 1e-6,
            tol_forms: 1e-10,
            q0: vec![5.0, 10.0, 20.0],
            matrices: 10,
            rows: 8,
            cols: 12,
            max_points: Budget::default().max_points,
            max_terms: Budget::default().max_terms,
            max_cells: 200_000,
            timing: false,
            input: None,
            out: None,
            format: Format::Csv,
        }
    }
}

/// Merges `overrides` over `base`, key by key.
fn merge(base: &mut toml::Table, overrides: toml::Table) {
    for (k, v) in overrides {
        base.insert(k, v);
    }
}

impl ExperimentConfig {
    /// Parses an optional config file and applies flag overrides on top.
    pub fn from_layers(file: Option<&str>, overrides: toml::Table) -> Result<Self, ConfigError> {
        let mut table = match file {
            Some(text) => text
                .parse::<toml::Table>()
                .map_err(|e| ConfigError::Parse(e.to_string()))?,
            None => toml::Table::new(),
        };
        merge(&mut table, overrides);
        let cfg: ExperimentConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        Self::from_layers(Some(text), toml::Table::new())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.family.is_empty() {
            return Err(ConfigError::invalid("family", "list must not be empty"));
        }
        if self.k < 1 {
            return Err(ConfigError::invalid("k", "must be at least 1"));
        }
        if self.q.is_empty() {
            return Err(ConfigError::invalid("Q", "list must not be empty"));
        }
        if self.q.contains(&0) {
            return Err(ConfigError::invalid("Q", "entries must be at least 1"));
        }
        if self.n.is_empty() {
            return Err(ConfigError::invalid("N", "list must not be empty"));
        }
        if self.n.iter().any(|&n| !(n >= 1.0 && n.is_finite())) {
            return Err(ConfigError::invalid("N", "entries must be finite and at least 1"));
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::invalid("seeds", "list must not be empty"));
        }
        if self.coeffs.is_empty() {
            return Err(ConfigError::invalid("coeffs", "list must not be empty"));
        }
        if self.q0.is_empty() {
            return Err(ConfigError::invalid("Q0", "list must not be empty"));
        }
        if self.q0.iter().any(|&q| !(q >= 1.0 && q.is_finite())) {
            return Err(ConfigError::invalid("Q0", "entries must be finite and at least 1"));
        }
        for (key, v) in [
            ("tol", self.tol),
            ("tol_weyl", self.tol_weyl),
            ("tol_duality", self.tol_duality),
            ("tol_transform", self.tol_transform),
            ("tol_forms", self.tol_forms),
        ] {
            if !(v > 0.0) {
                return Err(ConfigError::invalid(key, "tolerance must be positive"));
            }
        }
        if !(self.eps >= 0.0) {
            return Err(ConfigError::invalid("eps", "must be nonnegative"));
        }
        if !(self.c > 0.0) {
            return Err(ConfigError::invalid("C", "must be positive"));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(ConfigError::invalid("rows", "matrix dimensions must be positive"));
        }
        Ok(())
    }

    /// SHA-256 of the TOML form with the output-only keys cleared, as 16 hex
    /// digits. CSV and JSON runs of the same experiment share a hash.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.out = None;
        canonical.format = Format::Csv;
        canonical.timing = false;
        let digest = Sha256::digest(canonical.to_toml().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_points: self.max_points,
            max_terms: self.max_terms,
        }
    }

    pub fn associates_policy(&self) -> AssociatesPolicy {
        match self.associates {
            AssociatesName::Literal => AssociatesPolicy::Literal,
            AssociatesName::Units => AssociatesPolicy::UpToUnits,
        }
    }

    pub fn family_kind(&self, name: FamilyName) -> FamilyKind {
        match name {
            FamilyName::All => FamilyKind::All,
            FamilyName::Squares => FamilyKind::Squares,
            FamilyName::Power => FamilyKind::Power(self.k),
            FamilyName::SquareNorm => FamilyKind::SquareNorm,
        }
    }

    pub fn moduli_family(&self, name: FamilyName, q: u64) -> ModuliFamily {
        let range = match self.range {
            RangeName::Full => ModulusRange::Full(q),
            RangeName::Dyadic => ModulusRange::Dyadic(q),
        };
        ModuliFamily::new(self.family_kind(name), range, self.associates_policy())
    }
}

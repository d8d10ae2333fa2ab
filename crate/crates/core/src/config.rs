//! JSON run configuration shared by every `orlicz-lab` subcommand.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criteria::{default_epsilons, CriterionRequest, Property};
use crate::group::{CompactSet, Group, GroupElement};
use crate::weight::{Weight, WeightedSystem};
use crate::young::YoungFunction;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: &'static str, message: String },
}

impl ConfigError {
    fn field(field: &'static str, message: impl ToString) -> Self {
        ConfigError::Field {
            field,
            message: message.to_string(),
        }
    }
}

impl From<serde_json::Error> for ConfigError {
    fn from(e: serde_json::Error) -> Self {
        ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

/// The finite set `K`: an inclusive integer box or an explicit element list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KSpec {
    Box { lo: Vec<i64>, hi: Vec<i64> },
    Elements(Vec<GroupElement>),
}

impl KSpec {
    pub fn build(&self, group: &Group) -> Result<CompactSet, ConfigError> {
        let set = match self {
            KSpec::Box { lo, hi } => CompactSet::integer_box(group, lo, hi),
            KSpec::Elements(v) => CompactSet::new(v.iter().cloned()),
        }
        .map_err(|e| ConfigError::field("k", e))?;
        for g in set.iter() {
            group.check(g).map_err(|e| ConfigError::field("k", e))?;
        }
        Ok(set)
    }
}

/// Grid settings for `probe-young`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeSettings {
    pub t_lo: f64,
    pub t_hi: f64,
    pub n_grid: usize,
    pub y_max: f64,
    pub conjugate_rows: usize,
    pub samples: usize,
    pub convexity_t_hi: f64,
}

impl Default for ProbeSettings {
    fn default() -> Self {
        ProbeSettings {
            t_lo: 1e-3,
            t_hi: 1e3,
            n_grid: 241,
            y_max: 4.0,
            conjugate_rows: 128,
            samples: 2000,
            convexity_t_hi: 4.0,
        }
    }
}

fn default_depth() -> u32 {
    1
}

fn default_n_max() -> u64 {
    256
}

fn default_l_max() -> u32 {
    64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub group: Group,
    pub a: GroupElement,
    pub weight: Weight,
    pub young: YoungFunction,
    pub k: KSpec,
    pub property: Property,
    #[serde(default = "default_depth")]
    pub depth: u32,
    #[serde(default = "default_epsilons")]
    pub epsilons: Vec<f64>,
    #[serde(default = "default_n_max")]
    pub n_max: u64,
    #[serde(default = "default_l_max")]
    pub l_max: u32,
    #[serde(default)]
    pub override_obstructions: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub probe: ProbeSettings,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    /// Canonical pretty-printed form; `from_json ∘ to_canonical_json` is the identity.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.group.validate().map_err(|e| ConfigError::field("group", e))?;
        self.group.check(&self.a).map_err(|e| ConfigError::field("a", e))?;
        self.weight
            .validate(&self.group)
            .map_err(|e| ConfigError::field("weight", e))?;
        self.young.validate().map_err(|e| ConfigError::field("young", e))?;
        self.k.build(&self.group)?;
        if self.n_max == 0 {
            return Err(ConfigError::field("n_max", "must be positive"));
        }
        if self.l_max == 0 {
            return Err(ConfigError::field("l_max", "must be positive"));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(ConfigError::field(
                "epsilons",
                "need a non-empty list of values in (0, 1)",
            ));
        }
        let p = &self.probe;
        if !(p.t_lo > 0.0 && p.t_hi > p.t_lo && p.n_grid > 0 && p.y_max > 0.0 && p.conjugate_rows > 1 && p.samples > 0)
        {
            return Err(ConfigError::field(
                "probe",
                "grid bounds must be positive and increasing",
            ));
        }
        Ok(())
    }

    pub fn system(&self) -> Result<WeightedSystem, ConfigError> {
        WeightedSystem::new(
            self.group.clone(),
            self.a.clone(),
            self.weight.clone(),
            self.young.clone(),
        )
        .map_err(|e| ConfigError::field("weight", e))
    }

    pub fn compact_set(&self) -> Result<CompactSet, ConfigError> {
        self.k.build(&self.group)
    }

    /// The checker request; `depth = 0` is rejected here since every
    /// criterion needs `L ≥ 1`.
    pub fn request(&self) -> Result<CriterionRequest, ConfigError> {
        if self.depth == 0 {
            return Err(ConfigError::field("depth", "criteria need L >= 1"));
        }
        let mut req = CriterionRequest::new(self.system()?, self.compact_set()?)
            .with_depth(self.depth)
            .with_epsilons(self.epsilons.clone())
            .with_n_max(self.n_max)
            .with_l_max(self.l_max);
        req.override_obstructions = self.override_obstructions;
        Ok(req)
    }
}

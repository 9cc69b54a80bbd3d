//! Experiment configuration files and their expansion into scenario grids.
//!
//! A config file is a flat JSON object. Every axis may be a scalar or a list:
//!
//! ```json
//! { "policy": ["uniform", "age", "change", "e2e"],
//!   "p": [0.95, 0.8], "q": [0.9, 0.3],
//!   "ps": [0.4, 0.9],
//!   "period": 3, "threshold": 3,
//!   "slots": 1000000, "seed": 42 }
//! ```
//!
//! `p` and `q` are zipped into source pairs (a scalar is broadcast). Unknown
//! keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use semcom_core::engine::{DEFAULT_SEED, DEFAULT_SLOTS};
use semcom_core::{CostMatrix, ErasureChannel, MarkovSource, PolicyKind, PolicyName, SimConfig};

use crate::error::{CliError, Result};

pub const SEED_ENV: &str = "SEMCOM_SEED";
pub const DEFAULT_P: f64 = 0.95;
pub const DEFAULT_Q: f64 = 0.9;
pub const DEFAULT_PS: f64 = 0.4;
pub const DEFAULT_PERIOD: u32 = 3;
pub const DEFAULT_THRESHOLD: u32 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

/// Contents of a config file; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<OneOrMany<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ps: Option<OneOrMany<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<OneOrMany<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<OneOrMany<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cost: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<bool>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(CliError::ConfigNotFound(path.to_path_buf()))
            }
            Err(e) => return Err(CliError::Runtime(format!("reading {}: {e}", path.display()))),
        };
        serde_json::from_str(&text).map_err(|e| CliError::ConfigParse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Overlays `other`: every field set there wins.
    pub fn merge(self, other: ConfigFile) -> ConfigFile {
        ConfigFile {
            policy: other.policy.or(self.policy),
            p: other.p.or(self.p),
            q: other.q.or(self.q),
            ps: other.ps.or(self.ps),
            period: other.period.or(self.period),
            threshold: other.threshold.or(self.threshold),
            slots: other.slots.or(self.slots),
            seed: other.seed.or(self.seed),
            runs: other.runs.or(self.runs),
            cost: other.cost.or(self.cost),
            trace: other.trace.or(self.trace),
        }
    }
}

/// One row of an experiment: the simulation config plus the labels that go
/// into the output.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub config: SimConfig,
    pub p: f64,
    pub q: f64,
    pub period: u32,
    pub threshold: u32,
}

impl Scenario {
    pub fn new(policy: PolicyName, p: f64, q: f64, ps: f64, period: u32, threshold: u32) -> Result<Self> {
        let config = SimConfig {
            source: MarkovSource::two_state(p, q)?,
            channel: ErasureChannel::new(ps)?,
            policy: policy.with_params(period, threshold),
            cost: CostMatrix::default_two_state(),
            slots: DEFAULT_SLOTS,
            seed: DEFAULT_SEED,
            trace: false,
        };
        Ok(Self {
            config,
            p,
            q,
            period,
            threshold,
        })
    }

    pub fn ps(&self) -> f64 {
        self.config.channel.success_probability()
    }

    pub fn policy(&self) -> PolicyKind {
        self.config.policy
    }
}

/// A validated, non-empty list of scenarios plus run-level settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub scenarios: Vec<Scenario>,
    pub runs: usize,
    /// The merged configuration the grid was built from.
    pub effective: ConfigFile,
}

impl ExperimentGrid {
    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidConfig(msg.into())
}

fn non_empty<T: Clone>(name: &str, v: &Option<OneOrMany<T>>, default: T) -> Result<Vec<T>> {
    let values = v.as_ref().map_or_else(|| vec![default], OneOrMany::to_vec);
    if values.is_empty() {
        return Err(invalid(format!("`{name}` must not be an empty list")));
    }
    Ok(values)
}

/// Resolves the seed: explicit value, else `SEMCOM_SEED`, else the default.
pub fn resolve_seed(explicit: Option<u64>, env: Option<&str>) -> Result<u64> {
    match (explicit, env) {
        (Some(seed), _) => Ok(seed),
        (None, Some(text)) => text
            .trim()
            .parse()
            .map_err(|_| invalid(format!("{SEED_ENV}={text} is not an unsigned 64-bit integer"))),
        (None, None) => Ok(DEFAULT_SEED),
    }
}

/// Expands a merged config into its scenario grid.
///
/// Rows are ordered by policy, then source pair, then channel, then the
/// policy's own parameter (period for uniform, threshold for age-aware).
pub fn expand(file: &ConfigFile, env_seed: Option<&str>) -> Result<ExperimentGrid> {
    let policies = non_empty("policy", &file.policy, "e2e".to_string())?
        .iter()
        .map(|s| s.parse::<PolicyName>().map_err(invalid))
        .collect::<Result<Vec<_>>>()?;
    let ps = non_empty("ps", &file.ps, DEFAULT_PS)?;
    let periods = non_empty("period", &file.period, DEFAULT_PERIOD)?;
    let thresholds = non_empty("threshold", &file.threshold, DEFAULT_THRESHOLD)?;
    let ps_list = non_empty("p", &file.p, DEFAULT_P)?;
    let qs = non_empty("q", &file.q, DEFAULT_Q)?;
    let sources: Vec<(f64, f64)> = match (ps_list.len(), qs.len()) {
        (a, b) if a == b => ps_list.iter().copied().zip(qs.iter().copied()).collect(),
        (1, _) => qs.iter().map(|&q| (ps_list[0], q)).collect(),
        (_, 1) => ps_list.iter().map(|&p| (p, qs[0])).collect(),
        (a, b) => return Err(invalid(format!("`p` has {a} values but `q` has {b}"))),
    };
    let slots = file.slots.unwrap_or(DEFAULT_SLOTS);
    if slots == 0 {
        return Err(invalid("`slots` must be at least 1"));
    }
    let seed = resolve_seed(file.seed, env_seed)?;
    let runs = file.runs.unwrap_or(1);
    if runs == 0 {
        return Err(invalid("`runs` must be at least 1"));
    }
    let cost = match &file.cost {
        Some(rows) => CostMatrix::new(rows.clone())?,
        None => CostMatrix::default_two_state(),
    };
    let trace = file.trace.unwrap_or(false);

    let mut scenarios = Vec::new();
    for &policy in &policies {
        for &(p, q) in &sources {
            for &channel in &ps {
                let params: Vec<(u32, u32)> = match policy {
                    PolicyName::Uniform => periods.iter().map(|&period| (period, thresholds[0])).collect(),
                    PolicyName::Age => thresholds.iter().map(|&t| (periods[0], t)).collect(),
                    _ => vec![(periods[0], thresholds[0])],
                };
                for (period, threshold) in params {
                    let mut s = Scenario::new(policy, p, q, channel, period, threshold)?;
                    s.config.cost = cost.clone();
                    s.config.slots = slots;
                    s.config.seed = seed;
                    s.config.trace = trace;
                    s.config.validate()?;
                    scenarios.push(s);
                }
            }
        }
    }

    let mut effective = file.clone();
    effective.seed = Some(seed);
    Ok(ExperimentGrid {
        scenarios,
        runs,
        effective,
    })
}

/// Where a sidecar file for `out` goes: `<out>.<suffix>`.
pub fn sidecar_path(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

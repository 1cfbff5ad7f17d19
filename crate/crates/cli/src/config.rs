//! Experiment configuration and its schema check.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use telic::exp_dist::schema::DiscreteInstance;
use telic::gaussian_nav::{GaussianPolicy, NavTask};
use telic::{Base, DivergenceValue};

pub const SCHEMA: &str = include_str!("../schema/experiment.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Operation {
    Simulate,
    Phase,
    Reach,
    Refine,
    Curves,
    Sanov,
}

impl Operation {
    pub fn name(self) -> &'static str {
        match self {
            Operation::Simulate => "simulate",
            Operation::Phase => "phase",
            Operation::Reach => "reach",
            Operation::Refine => "refine",
            Operation::Curves => "curves",
            Operation::Sanov => "sanov",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub operation: Option<Operation>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub base: Option<Base>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub task: Option<NavTask<f64>>,
    #[serde(default)]
    pub discrete: Option<DiscreteInstance>,
    #[serde(default)]
    pub simulate: Option<SimulateParams>,
    #[serde(default)]
    pub phase: Option<PhaseParams>,
    #[serde(default)]
    pub reach: Option<ReachParams>,
    #[serde(default)]
    pub curves: Option<CurveParams>,
    #[serde(default)]
    pub sanov: Option<SanovParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateParams {
    pub policies: Vec<GaussianPolicy<f64>>,
    #[serde(default = "default_trajectories")]
    pub trajectories: usize,
}

fn default_trajectories() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseParams {
    #[serde(default)]
    pub mu_range: Option<[f64; 2]>,
    #[serde(default)]
    pub sigma_range: Option<[f64; 2]>,
    #[serde(default = "default_resolution")]
    pub resolution: [usize; 2],
    /// Extra iso-complexity levels to draw, in the run base.
    #[serde(default)]
    pub contour_levels: Vec<f64>,
    #[serde(default)]
    pub four_panel: Option<Shift>,
}

fn default_resolution() -> [usize; 2] {
    [121, 100]
}

/// Moves one region before the split panels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Shift {
    pub region: String,
    pub center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReachParams {
    /// Per-step budget; defaults to the task's own.
    #[serde(default)]
    pub delta: Option<DivergenceValue<f64>>,
    #[serde(default = "default_rounds")]
    pub max_rounds: usize,
}

fn default_rounds() -> usize {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveParams {
    /// Budgets in the run base, ascending.
    pub budgets: Vec<f64>,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub references: Vec<Reference>,
}

/// A curve reference: an explicit policy, the task's default policy, or the
/// budget-limited policy toward `toward` from the default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    pub name: String,
    #[serde(default)]
    pub policy: Option<GaussianPolicy<f64>>,
    #[serde(default)]
    pub toward: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SanovParams {
    pub state: String,
    pub sample_sizes: Vec<usize>,
    pub trials: u64,
}

/// A config as read from disk: the raw bytes (for hashing), the parsed JSON
/// (for provenance) and the typed form.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub raw: Vec<u8>,
    pub json: Value,
    pub config: ExperimentConfig,
}

impl LoadedConfig {
    pub fn sha256(&self) -> String {
        format!("{:x}", Sha256::digest(&self.raw))
    }

    pub fn task(&self) -> Result<&NavTask<f64>> {
        self.config.task.as_ref().context("config has no `task`")
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig> {
    let raw = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse(raw)
}

pub fn parse(raw: Vec<u8>) -> Result<LoadedConfig> {
    let json: Value = serde_json::from_slice(&raw).context("config is not valid JSON")?;
    validate(&json)?;
    let config: ExperimentConfig = serde_json::from_value(json.clone()).context("config does not match the schema")?;
    if let Some(t) = &config.task {
        t.validate().context("invalid task")?;
    }
    Ok(LoadedConfig { raw, json, config })
}

pub fn validate(json: &Value) -> Result<()> {
    let schema: Value = serde_json::from_str(SCHEMA).expect("bundled schema is valid JSON");
    let compiled = jsonschema::JSONSchema::options()
        .with_draft(jsonschema::Draft::Draft7)
        .compile(&schema)
        .expect("bundled schema compiles");
    if let Err(errors) = compiled.validate(json) {
        let lines: Vec<String> = errors
            .map(|e| {
                let at = e.instance_path.to_string();
                format!("  at `{}`: {e}", if at.is_empty() { "/" } else { &at })
            })
            .collect();
        bail!("config failed schema validation:\n{}", lines.join("\n"));
    }
    Ok(())
}

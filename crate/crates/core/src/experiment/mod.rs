//! Ablation harness: trains one of the four agent variants over many seeds,
//! aggregates the learning curves, evaluates greedy policies and writes the
//! results to disk.

mod curve;
mod export;
mod run;

pub use curve::{episodes_to_plateau, read_curve_csv, write_curve_csv, AggregateCurve};
pub use export::{export_results, prepare_output, Manifest, OutputDir};
pub use run::{evaluate_greedy, run_experiment, run_experiment_sequential, train_run, Experiment, GreedyEval, Resources, RunResult};

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agents::{AgentError, AgentKind, LearningParams};
use crate::attention::AttentionConfig;
use crate::context::{ExtractorConfig, KbError};
use crate::env::{RewardMode, RewardModel, WorldError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Flat,
    FlatAtt,
    Hrl,
    HrlAtt,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Flat, Variant::FlatAtt, Variant::Hrl, Variant::HrlAtt];

    /// Directory and file name slug.
    pub fn slug(self) -> &'static str {
        match self {
            Variant::Flat => "flat",
            Variant::FlatAtt => "flat_att",
            Variant::Hrl => "hrl",
            Variant::HrlAtt => "hrl_att",
        }
    }

    pub fn kind(self) -> AgentKind {
        match self {
            Variant::Flat | Variant::FlatAtt => AgentKind::Flat,
            Variant::Hrl | Variant::HrlAtt => AgentKind::Hierarchical,
        }
    }

    pub fn attention(self) -> bool {
        matches!(self, Variant::FlatAtt | Variant::HrlAtt)
    }

    /// Reward mode the variant is reported under in the ablation: flat agents
    /// with intrinsic rewards, hierarchical agents with sparse rewards.
    pub fn reference_reward_mode(self) -> RewardMode {
        match self.kind() {
            AgentKind::Flat => RewardMode::Intrinsic,
            AgentKind::Hierarchical => RewardMode::Sparse,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_lowercase().replace('-', "_");
        Variant::ALL
            .into_iter()
            .find(|v| v.slug() == norm)
            .ok_or_else(|| format!("unknown variant `{s}` (expected flat, flat_att, hrl or hrl_att)"))
    }
}

fn default_runs() -> usize {
    50
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// One experiment. Serialized form is the JSON config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub variant: Variant,
    pub reward_mode: RewardMode,
    /// Map file; the shipped map when absent.
    #[serde(default)]
    pub map: Option<PathBuf>,
    /// Knowledge base file; the shipped one when absent.
    #[serde(default)]
    pub kb: Option<PathBuf>,
    #[serde(default)]
    pub params: LearningParams,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Replaces the mode's default reward magnitudes.
    #[serde(default)]
    pub rewards: Option<RewardModel>,
    #[serde(default)]
    pub attention: AttentionConfig,
    #[serde(default)]
    pub extractor: ExtractorConfig,
}

impl ExperimentConfig {
    /// Shipped map and kb, default parameters, 50 runs from seed 0.
    pub fn new(variant: Variant, reward_mode: RewardMode) -> Self {
        Self {
            variant,
            reward_mode,
            map: None,
            kb: None,
            params: LearningParams::default(),
            runs: default_runs(),
            seed: 0,
            out: default_out(),
            rewards: None,
            attention: AttentionConfig::default(),
            extractor: ExtractorConfig::default(),
        }
    }

    /// The variant under its reference reward mode.
    pub fn reference(variant: Variant) -> Self {
        Self::new(variant, variant.reference_reward_mode())
    }

    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let config: Self = serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn reward_model(&self) -> RewardModel {
        self.rewards.unwrap_or_else(|| RewardModel::for_mode(self.reward_mode))
    }

    /// Whether this pairs the variant with the reward mode it is compared
    /// under. Other pairings run fine but are flagged in the manifest.
    pub fn is_reference_pairing(&self) -> bool {
        self.reward_mode == self.variant.reference_reward_mode()
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        self.params.validate().map_err(ExperimentError::Config)?;
        if self.runs == 0 {
            return Err(ExperimentError::Config("runs must be positive".into()));
        }
        let rewards = self.reward_model();
        if rewards.mode != self.reward_mode || !rewards.is_consistent() {
            return Err(ExperimentError::Config(format!("reward magnitudes are inconsistent with {:?} mode", self.reward_mode)));
        }
        let a = &self.attention;
        if !(a.avoid_magnitude > 0.0 && a.seek_magnitude > 0.0 && a.epsilon_factor >= 1.0) {
            return Err(ExperimentError::Config("attention magnitudes must be positive and epsilon_factor >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("run with seed {seed} failed: {source}")]
    Run {
        seed: u64,
        #[source]
        source: AgentError,
    },
    #[error("cannot write results to {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed curve file: {0}")]
    Curve(String),
}

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::agents::EpisodeMetrics;

use super::ExperimentError;

/// Per-episode statistics across runs. Standard deviation is the population
/// form (divide by the run count).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AggregateCurve {
    pub mean_reward: Vec<f64>,
    pub std_reward: Vec<f64>,
    pub success_rate: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CurveRow {
    episode: usize,
    mean_reward: f64,
    std_reward: f64,
    success_rate: f64,
}

impl AggregateCurve {
    /// Aggregates equally long per-run curves.
    pub fn from_runs(runs: &[Vec<EpisodeMetrics>]) -> Self {
        let episodes = runs.iter().map(Vec::len).min().unwrap_or(0);
        let n = runs.len() as f64;
        let mut curve = Self::default();
        for e in 0..episodes {
            let mean = runs.iter().map(|r| r[e].total_reward).sum::<f64>() / n;
            let var = runs.iter().map(|r| (r[e].total_reward - mean).powi(2)).sum::<f64>() / n;
            curve.mean_reward.push(mean);
            curve.std_reward.push(var.sqrt());
            curve.success_rate.push(runs.iter().filter(|r| r[e].success).count() as f64 / n);
        }
        curve
    }

    pub fn len(&self) -> usize {
        self.mean_reward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_reward.is_empty()
    }

    /// Mean of `mean_reward` over the whole curve.
    pub fn overall_mean_reward(&self) -> f64 {
        self.mean_reward.iter().sum::<f64>() / self.len().max(1) as f64
    }

    /// Mean success rate over the last `n` episodes.
    pub fn final_success_rate(&self, n: usize) -> f64 {
        let tail = &self.success_rate[self.len().saturating_sub(n)..];
        tail.iter().sum::<f64>() / tail.len().max(1) as f64
    }
}

/// Writes `episode,mean_reward,std_reward,success_rate`, one row per episode.
pub fn write_curve_csv<W: Write>(curve: &AggregateCurve, out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for e in 0..curve.len() {
        w.serialize(CurveRow {
            episode: e,
            mean_reward: curve.mean_reward[e],
            std_reward: curve.std_reward[e],
            success_rate: curve.success_rate[e],
        })
        .map_err(|err| ExperimentError::Curve(err.to_string()))?;
    }
    w.flush().map_err(|err| ExperimentError::Curve(err.to_string()))
}

pub fn read_curve_csv<R: Read>(input: R) -> Result<AggregateCurve, ExperimentError> {
    let mut curve = AggregateCurve::default();
    for (i, row) in csv::Reader::from_reader(input).deserialize::<CurveRow>().enumerate() {
        let row = row.map_err(|err| ExperimentError::Curve(err.to_string()))?;
        if row.episode != i {
            return Err(ExperimentError::Curve(format!("row {i} has episode {}", row.episode)));
        }
        curve.mean_reward.push(row.mean_reward);
        curve.std_reward.push(row.std_reward);
        curve.success_rate.push(row.success_rate);
    }
    Ok(curve)
}

/// Episodes until the `window`-episode moving average of `rewards` first
/// covers `fraction` of the way from its starting level to its plateau.
/// The plateau is the mean of the final `window` episodes and the starting
/// level is the first full window, so the measure works for negative
/// rewards too. Returns the index of the last episode in the first window
/// that crosses, or `rewards.len()` if the curve never rises.
pub fn episodes_to_plateau(rewards: &[f64], window: usize, fraction: f64) -> usize {
    if window == 0 || rewards.len() < window {
        return rewards.len();
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let start = mean(&rewards[..window]);
    let plateau = mean(&rewards[rewards.len() - window..]);
    if plateau <= start {
        return if plateau == start { window - 1 } else { rewards.len() };
    }
    let target = start + fraction * (plateau - start);
    let mut sum: f64 = rewards[..window].iter().sum();
    for end in window..=rewards.len() {
        if end > window {
            sum += rewards[end - 1] - rewards[end - 1 - window];
        }
        if sum / window as f64 >= target {
            return end - 1;
        }
    }
    rewards.len()
}

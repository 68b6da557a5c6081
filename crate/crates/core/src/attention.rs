//! Attention field: per-cell shaping potentials built from context records.
//!
//! Potentials bias which move the agent *selects*; they never enter the
//! Q-update. Cells carrying an avoid potential are additionally excluded
//! from both greedy and exploratory draws. A seek potential stops pulling
//! once the agent has entered its cell in the current episode; without that,
//! a greedy policy would oscillate around any seek cell that is worth more
//! than the value gap to its neighbors.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::context::{ContextRecord, Polarity};
use crate::env::{Action, AgentState, Cell, GridWorld};

/// Tunables, configurable as `attention.avoid_magnitude`,
/// `attention.seek_magnitude` and `attention.epsilon_factor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttentionConfig {
    pub avoid_magnitude: f64,
    pub seek_magnitude: f64,
    pub epsilon_factor: f64,
}

impl Default for AttentionConfig {
    fn default() -> Self {
        Self { avoid_magnitude: 100.0, seek_magnitude: 5.0, epsilon_factor: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttentionField {
    potentials: BTreeMap<Cell, f64>,
    /// Seek cells already reached this episode.
    #[serde(default)]
    satisfied: BTreeSet<Cell>,
    active: bool,
    config: AttentionConfig,
}

impl Default for AttentionField {
    fn default() -> Self {
        Self::new(AttentionConfig::default())
    }
}

impl AttentionField {
    pub fn new(config: AttentionConfig) -> Self {
        Self { potentials: BTreeMap::new(), satisfied: BTreeSet::new(), active: false, config }
    }

    pub fn config(&self) -> &AttentionConfig {
        &self.config
    }

    pub fn is_active(&self) -> bool {
        self.active
    }

    /// Potential at `cell`; 0 where nothing was reported.
    pub fn potential(&self, cell: Cell) -> f64 {
        self.potentials.get(&cell).copied().unwrap_or(0.0)
    }

    /// Potential that shaping adds for a move ending on `cell`: like
    /// [`AttentionField::potential`] but 0 for seek cells already reached.
    pub fn effective_potential(&self, cell: Cell) -> f64 {
        let p = self.potential(cell);
        if p > 0.0 && self.satisfied.contains(&cell) {
            0.0
        } else {
            p
        }
    }

    /// Records that the agent stands on `cell`.
    pub fn visit(&mut self, cell: Cell) {
        if self.potential(cell) > 0.0 {
            self.satisfied.insert(cell);
        }
    }

    pub fn satisfied(&self) -> &BTreeSet<Cell> {
        &self.satisfied
    }

    pub fn potentials(&self) -> &BTreeMap<Cell, f64> {
        &self.potentials
    }

    /// Writes each record's cells in order; the last write to a cell wins.
    pub fn apply(&mut self, records: &[ContextRecord]) {
        for record in records {
            let value = match record.polarity {
                Polarity::Avoid => -self.config.avoid_magnitude,
                Polarity::Seek => self.config.seek_magnitude,
            };
            for &cell in &record.cells {
                self.potentials.insert(cell, value);
                self.satisfied.remove(&cell);
            }
            self.active = true;
        }
    }

    /// Potential at or below which a move's destination is excluded.
    pub fn hard_avoid_threshold(&self) -> f64 {
        -self.config.avoid_magnitude / 2.0
    }

    /// Whether moving with `action` from `state` lands on an avoided cell.
    pub fn excludes(&self, state: &AgentState, world: &GridWorld, action: Action) -> bool {
        action.direction().is_some() && self.potential(destination(state, world, action)) < self.hard_avoid_threshold()
    }

    /// Exploration-decay multiplier: steeper once any context was applied.
    pub fn epsilon_factor(&self) -> f64 {
        if self.active {
            self.config.epsilon_factor
        } else {
            1.0
        }
    }

    /// Clears potentials for a new episode while keeping the activation
    /// latch, which drives the exploration schedule across episodes.
    pub fn reset_potentials(&mut self) {
        self.potentials.clear();
        self.satisfied.clear();
    }
}

/// Functional form of [`AttentionField::apply`].
pub fn apply_context(field: &AttentionField, records: &[ContextRecord]) -> AttentionField {
    let mut out = field.clone();
    out.apply(records);
    out
}

/// Cell a move would end on; blocked moves stay put.
pub fn destination(state: &AgentState, world: &GridWorld, action: Action) -> Cell {
    match action.direction().and_then(|d| state.position.neighbor(d, world.width(), world.height())) {
        Some(cell) if !world.is_obstacle(cell) => cell,
        _ => state.position,
    }
}

/// Adds the destination potential to every move's value; other actions pass
/// through unchanged. `q_row[i]` belongs to `legal[i]`.
pub fn shape_preferences(field: &AttentionField, state: &AgentState, world: &GridWorld, q_row: &[f64], legal: &[Action]) -> Vec<f64> {
    debug_assert_eq!(q_row.len(), legal.len());
    q_row
        .iter()
        .zip(legal)
        .map(|(&q, &a)| if a.direction().is_some() { q + field.effective_potential(destination(state, world, a)) } else { q })
        .collect()
}

/// Free-function form of [`AttentionField::epsilon_factor`].
pub fn epsilon_factor(field: &AttentionField) -> f64 {
    field.epsilon_factor()
}

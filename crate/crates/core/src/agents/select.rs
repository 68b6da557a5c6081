use rand::Rng;

use crate::attention::{shape_preferences, AttentionField};
use crate::env::{Action, AgentState, GridWorld};

use super::qtable::argmax;

/// Outcome of one action-selection draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Selection {
    /// Column within the worker's legal action list.
    pub column: usize,
    pub action: Action,
    pub explored: bool,
    /// Every legal action was excluded by avoid potentials, so exclusion was
    /// lifted for this draw.
    pub boxed_in: bool,
}

/// Epsilon-greedy selection over `legal` with optional attention shaping.
/// Avoided destinations are excluded from both the random and the greedy
/// branch. Greedy ties go to the lowest column when `epsilon` is 0 and to a
/// uniformly drawn tied column otherwise: with zero-initialized tables a
/// fixed tie-break would steer every unvisited state the same way and starve
/// sparse-reward exploration.
pub fn select_action<R: Rng + ?Sized>(
    q_row: &[f64],
    legal: &[Action],
    epsilon: f64,
    field: Option<&AttentionField>,
    state: &AgentState,
    world: &GridWorld,
    rng: &mut R,
) -> Selection {
    debug_assert_eq!(q_row.len(), legal.len());
    let mut allowed: Vec<usize> = match field {
        Some(f) => (0..legal.len()).filter(|&i| !f.excludes(state, world, legal[i])).collect(),
        None => (0..legal.len()).collect(),
    };
    let boxed_in = allowed.is_empty();
    if boxed_in {
        allowed = (0..legal.len()).collect();
    }

    if epsilon > 0.0 && rng.random::<f64>() < epsilon {
        let column = allowed[rng.random_range(0..allowed.len())];
        return Selection { column, action: legal[column], explored: true, boxed_in };
    }

    let prefs = match field {
        Some(f) => shape_preferences(f, state, world, q_row, legal),
        None => q_row.to_vec(),
    };
    let candidates: Vec<f64> = allowed.iter().map(|&i| prefs[i]).collect();
    let best = argmax(&candidates);
    let column = if epsilon > 0.0 {
        let ties: Vec<usize> = (0..candidates.len()).filter(|&i| candidates[i] == candidates[best]).collect();
        allowed[if ties.len() > 1 { ties[rng.random_range(0..ties.len())] } else { best }]
    } else {
        allowed[best]
    };
    Selection { column, action: legal[column], explored: false, boxed_in }
}

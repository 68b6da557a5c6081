use crate::env::Action;

use super::{AgentError, LearningParams};

/// Dense state x action value table, zero-initialized. Columns follow
/// `actions`, the owning worker's legal action order.
#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    values: Vec<f64>,
    states: usize,
    actions: Vec<Action>,
}

impl QTable {
    pub fn new(states: usize, actions: &[Action]) -> Self {
        Self { values: vec![0.0; states * actions.len()], states, actions: actions.to_vec() }
    }

    pub(crate) fn from_values(states: usize, actions: Vec<Action>, values: Vec<f64>) -> Option<Self> {
        (values.len() == states * actions.len()).then_some(Self { values, states, actions })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, state: usize) -> &[f64] {
        let n = self.actions.len();
        &self.values[state * n..(state + 1) * n]
    }

    pub fn get(&self, state: usize, action: usize) -> f64 {
        self.values[state * self.actions.len() + action]
    }

    pub fn set(&mut self, state: usize, action: usize, value: f64) {
        let n = self.actions.len();
        self.values[state * n + action] = value;
    }

    pub fn max(&self, state: usize) -> f64 {
        self.row(state).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Column of `action`, if this table covers it.
    pub fn column_of(&self, action: Action) -> Option<usize> {
        self.actions.iter().position(|&a| a == action)
    }

    /// Greedy column, lowest index on ties.
    pub fn greedy(&self, state: usize) -> usize {
        argmax(self.row(state))
    }

    fn check(&self, state: usize, action: usize) -> Result<(), AgentError> {
        if state >= self.states || action >= self.actions.len() {
            Err(AgentError::IndexOutOfRange { state, action })
        } else {
            Ok(())
        }
    }
}

/// Index of the maximum, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// One-step temporal-difference update toward `reward + gamma * bootstrap`
/// (no bootstrap when `terminal`). Only entry (state, action) changes.
pub fn td_update(
    q: &mut QTable,
    state: usize,
    action: usize,
    reward: f64,
    bootstrap: f64,
    terminal: bool,
    params: &LearningParams,
) -> Result<(), AgentError> {
    if !reward.is_finite() {
        return Err(AgentError::NonFiniteReward(reward));
    }
    q.check(state, action)?;
    let target = if terminal { reward } else { reward + params.gamma * bootstrap };
    let old = q.get(state, action);
    q.set(state, action, old + params.alpha * (target - old));
    Ok(())
}

/// Standard Q-learning update bootstrapping from the same table's
/// `max_a' Q(next_state, a')`.
pub fn q_update(
    q: &mut QTable,
    state: usize,
    action: usize,
    reward: f64,
    next_state: usize,
    done: bool,
    params: &LearningParams,
) -> Result<(), AgentError> {
    if next_state >= q.states {
        return Err(AgentError::IndexOutOfRange { state: next_state, action });
    }
    let bootstrap = q.max(next_state);
    td_update(q, state, action, reward, bootstrap, done, params)
}

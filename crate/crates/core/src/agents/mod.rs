//! Tabular learners: the flat Q-learning agent and the hierarchical agent
//! (rule-based strategy manager over one learned worker table per strategy),
//! the exploration schedule, and the episode driver.

mod episode;
pub mod persist;
mod qtable;
mod schedule;
mod select;
mod strategy;

pub use episode::{run_episode, Agent, AgentKind, EpisodeLoop, EpisodeMetrics, EpisodeReport, EpisodeSetup, Mode, StepRecord, UpdateInputs};
pub use qtable::{argmax, q_update, td_update, QTable};
pub use schedule::{epsilon_at, LearningParams};
pub use select::{select_action, Selection};
pub use strategy::{select_strategy, strategy_terminated, Strategy};

use thiserror::Error;

use crate::env::StepError;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error(transparent)]
    Step(#[from] StepError),
    #[error("non-finite reward {0}")]
    NonFiniteReward(f64),
    #[error("table index out of range (state {state}, action {action})")]
    IndexOutOfRange { state: usize, action: usize },
}

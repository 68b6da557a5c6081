//! Hierarchical Q-learning for a search-and-rescue grid world, with free-text
//! verbal inputs grounded into context records that shape the agent's
//! behavior through an attention field.
//!
//! Module map:
//! - [`env`]: grid world, transition/reward function, step budget.
//! - [`context`]: verbal input -> grounded [`context::ContextRecord`]s, the
//!   knowledge base, and the ordered information space.
//! - [`attention`]: per-cell shaping potentials and the exploration modifier.
//! - [`agents`]: Q-tables, the rule-based strategy manager, workers,
//!   epsilon schedule and the episode loop.
//! - [`experiment`]: multi-run ablations, greedy evaluation and export.

pub mod agents;
pub mod attention;
pub mod context;
pub mod env;
pub mod experiment;

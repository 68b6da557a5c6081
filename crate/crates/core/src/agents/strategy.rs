use std::fmt;

use serde::{Deserialize, Serialize};

use crate::context::{next_required_info, InformationSpace};
use crate::env::{Action, AgentState, GridWorld, StepOutcome};

/// Temporally extended sub-task chosen by the manager.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Strategy {
    Explore,
    Collect,
    Operate,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Explore, Strategy::Collect, Strategy::Operate];

    pub fn index(self) -> usize {
        match self {
            Strategy::Explore => 0,
            Strategy::Collect => 1,
            Strategy::Operate => 2,
        }
    }

    /// Primitive actions this strategy's worker may choose from.
    pub fn legal_actions(self) -> &'static [Action] {
        match self {
            Strategy::Explore => &Action::ALL[0..4],
            Strategy::Collect => &Action::ALL[4..10],
            Strategy::Operate => &Action::ALL[10..14],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Explore => "EXPLORE",
            Strategy::Collect => "COLLECT",
            Strategy::Operate => "OPERATE",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Action {
    /// The unique strategy whose legal set holds this action.
    pub fn strategy(self) -> Strategy {
        match self {
            Action::Move(_) => Strategy::Explore,
            Action::Collect(_) => Strategy::Collect,
            Action::Operate(_) => Strategy::Operate,
        }
    }
}

/// Rule-based manager: COLLECT on the next required information point,
/// OPERATE at the victim once everything is collected, EXPLORE otherwise.
pub fn select_strategy(state: &AgentState, world: &GridWorld, space: &InformationSpace) -> Strategy {
    // Out-of-order flags are unreachable; such states just explore.
    match next_required_info(space, state.info_flags) {
        Ok(Some(info)) if world.info_at(state.position) == Some(info) => Strategy::Collect,
        Ok(None) if state.position == world.victim() && !state.victim_saved => Strategy::Operate,
        _ => Strategy::Explore,
    }
}

/// Termination condition: single-action strategies end after one step;
/// EXPLORE ends once the manager would pick something else.
pub fn strategy_terminated(strategy: Strategy, outcome: &StepOutcome, world: &GridWorld, space: &InformationSpace) -> bool {
    match strategy {
        Strategy::Collect | Strategy::Operate => true,
        Strategy::Explore => outcome.done || select_strategy(&outcome.next_state, world, space) != Strategy::Explore,
    }
}

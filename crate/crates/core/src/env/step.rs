use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Action, AgentState, Cell, GridWorld, InfoType, Operation, RewardModel};

#[derive(Debug, Error, PartialEq)]
pub enum StepError {
    #[error("episode is already done")]
    EpisodeDone,
    #[error("state {0:?} is not valid for this world")]
    InvalidState(AgentState),
    #[error("action index {0} is not one of the 14 primitive actions")]
    UnknownAction(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Event {
    Collision { cell: Cell },
    Blocked,
    Collected { info: InfoType },
    WrongAction,
    Rescued,
    VerbalTriggered { info: InfoType, text: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    pub next_state: AgentState,
    pub reward: f64,
    pub events: Vec<Event>,
    pub done: bool,
}

impl StepOutcome {
    pub fn rescued(&self) -> bool {
        self.events.iter().any(|e| matches!(e, Event::Rescued))
    }

    pub fn collided(&self) -> bool {
        self.events.iter().any(|e| matches!(e, Event::Collision { .. }))
    }
}

/// Transition and reward function. Pure: the same inputs always give the same
/// outcome. `done` here only reflects a rescue; the step budget is tracked by
/// [`EnvRun`].
pub fn step(world: &GridWorld, state: &AgentState, action: Action, rewards: &RewardModel) -> Result<StepOutcome, StepError> {
    if state.victim_saved {
        return Err(StepError::EpisodeDone);
    }
    if !world.in_bounds(state.position) || world.is_obstacle(state.position) {
        return Err(StepError::InvalidState(*state));
    }

    let mut next = *state;
    let mut reward = rewards.step_cost;
    let mut events = Vec::new();
    let mut done = false;

    match action {
        Action::Move(dir) => match state.position.neighbor(dir, world.width(), world.height()) {
            Some(cell) if !world.is_obstacle(cell) => {
                next.position = cell;
                if world.is_hazard(cell) {
                    events.push(Event::Collision { cell });
                    reward += rewards.collision_penalty;
                }
                if let Some(info) = world.info_at(cell) {
                    if !state.has(info) {
                        events.push(Event::VerbalTriggered { info, text: world.message(info).to_owned() });
                    }
                }
            }
            _ => {
                events.push(Event::Blocked);
                reward += rewards.blocked_penalty;
            }
        },
        Action::Collect(label) => {
            let next_required = InfoType::ALL.into_iter().find(|t| !state.has(*t));
            match (label.info_type(), world.info_at(state.position)) {
                (Some(wanted), Some(here)) if wanted == here && next_required == Some(here) => {
                    next.info_flags[here.index()] = true;
                    events.push(Event::Collected { info: here });
                    reward += rewards.collect_reward;
                }
                _ => {
                    events.push(Event::WrongAction);
                    reward += rewards.wrong_action_penalty;
                }
            }
        }
        Action::Operate(op) => {
            if op == Operation::Save && state.position == world.victim() && state.all_collected() {
                next.victim_saved = true;
                events.push(Event::Rescued);
                reward += rewards.rescue_reward;
                done = true;
            } else {
                events.push(Event::WrongAction);
                reward += rewards.wrong_action_penalty;
            }
        }
    }

    Ok(StepOutcome { next_state: next, reward, events, done })
}

/// Per-episode environment bookkeeping around [`step`].
#[derive(Debug, Clone, PartialEq)]
pub struct EnvRun {
    pub state: AgentState,
    pub steps: usize,
    pub done: bool,
    triggered: [bool; 3],
    revealed: bool,
}

impl EnvRun {
    /// Fresh episode at the world's start with hazards and POIs hidden.
    pub fn reset(world: &GridWorld) -> Self {
        Self { state: AgentState::at(world.start()), steps: 0, done: false, triggered: [false; 3], revealed: false }
    }

    /// Advances one step. Each information point's message fires at most once
    /// per episode, and the episode ends on rescue or when the budget runs out.
    pub fn step(&mut self, world: &GridWorld, action: Action, rewards: &RewardModel) -> Result<StepOutcome, StepError> {
        if self.done {
            return Err(StepError::EpisodeDone);
        }
        let mut outcome = step(world, &self.state, action, rewards)?;
        let triggered = &mut self.triggered;
        outcome.events.retain(|e| match e {
            Event::VerbalTriggered { info, .. } => !std::mem::replace(&mut triggered[info.index()], true),
            _ => true,
        });
        self.steps += 1;
        self.state = outcome.next_state;
        if self.steps >= world.max_steps() {
            outcome.done = true;
        }
        self.done = outcome.done;
        Ok(outcome)
    }

    /// Marks hazards and points of interest as known.
    pub fn reveal(&mut self) {
        self.revealed = true;
    }

    pub fn is_revealed(&self) -> bool {
        self.revealed
    }

    /// Hazard cells currently visible to an observer.
    pub fn visible_hazards<'w>(&self, world: &'w GridWorld) -> &'w [Cell] {
        if self.revealed {
            world.hazards()
        } else {
            &[]
        }
    }

    pub fn visible_points_of_interest<'w>(&self, world: &'w GridWorld) -> &'w [Cell] {
        if self.revealed {
            world.points_of_interest()
        } else {
            &[]
        }
    }
}

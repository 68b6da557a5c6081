use std::collections::VecDeque;
use std::sync::mpsc::Receiver;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::attention::AttentionField;
use crate::context::{ContextExtractor, ContextRecord, InformationSpace, VerbalInput, VerbalSource};
use crate::env::{Action, AgentState, Cell, EnvRun, Event, GridWorld, RewardModel, StepOutcome};

use super::qtable::td_update;
use super::{epsilon_at, select_action, select_strategy, AgentError, LearningParams, QTable, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    /// One table over all 14 actions, no manager.
    Flat,
    /// Rule-based manager with one learned worker table per strategy.
    Hierarchical,
}

/// Learned tables for either agent kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    kind: AgentKind,
    tables: Vec<QTable>,
}

impl Agent {
    pub fn new(kind: AgentKind, world: &GridWorld) -> Self {
        let states = world.state_count();
        let tables = match kind {
            AgentKind::Flat => vec![QTable::new(states, &Action::ALL)],
            AgentKind::Hierarchical => Strategy::ALL.iter().map(|s| QTable::new(states, s.legal_actions())).collect(),
        };
        Self { kind, tables }
    }

    pub(crate) fn from_tables(kind: AgentKind, tables: Vec<QTable>) -> Self {
        Self { kind, tables }
    }

    pub fn kind(&self) -> AgentKind {
        self.kind
    }

    pub fn tables(&self) -> &[QTable] {
        &self.tables
    }

    pub fn tables_mut(&mut self) -> &mut [QTable] {
        &mut self.tables
    }

    /// Table that acts in `state`, with the manager's strategy for the
    /// hierarchical agent.
    pub fn route(&self, state: &AgentState, world: &GridWorld, space: &InformationSpace) -> (usize, Option<Strategy>) {
        match self.kind {
            AgentKind::Flat => (0, None),
            AgentKind::Hierarchical => {
                let s = select_strategy(state, world, space);
                (s.index(), Some(s))
            }
        }
    }

    /// `max_a Q(state, a)` read from whichever table will act in `state`.
    pub fn state_value(&self, state: &AgentState, world: &GridWorld, space: &InformationSpace) -> f64 {
        let (t, _) = self.route(state, world, space);
        self.tables[t].max(state.index(world.width()))
    }
}

/// Fixed inputs shared by every step of an episode.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeSetup<'a> {
    pub world: &'a GridWorld,
    pub rewards: &'a RewardModel,
    pub params: &'a LearningParams,
    pub space: &'a InformationSpace,
    pub attention: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Epsilon-greedy with learning, epsilon from the schedule at `episode`.
    Train { episode: usize },
    /// Epsilon = 0, tables untouched.
    Greedy,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub total_reward: f64,
    pub discounted_return: f64,
    pub steps: usize,
    pub collisions: usize,
    pub success: bool,
}

/// Exact inputs handed to the TD update, kept so callers can check that
/// shaping never reaches the learning target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateInputs {
    pub table: usize,
    pub state: usize,
    pub column: usize,
    pub reward: f64,
    pub bootstrap: f64,
    pub terminal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub strategy: Option<Strategy>,
    pub action: Action,
    pub epsilon: f64,
    pub explored: bool,
    pub boxed_in: bool,
    pub outcome: StepOutcome,
    pub update: Option<UpdateInputs>,
    /// Context applied at the boundary after this step.
    pub applied: Vec<ContextRecord>,
}

/// Step-at-a-time episode driver. Verbal inputs queued with
/// [`EpisodeLoop::enqueue`] are processed only at step boundaries.
#[derive(Debug, Clone)]
pub struct EpisodeLoop {
    env: EnvRun,
    field: AttentionField,
    metrics: EpisodeMetrics,
    discount: f64,
    pending: VecDeque<VerbalInput>,
    notes: Vec<String>,
    trajectory: Vec<Cell>,
    rewards: Vec<f64>,
}

impl EpisodeLoop {
    /// Starts an episode. `field` keeps its activation latch but should carry
    /// no potentials from earlier episodes.
    pub fn new(world: &GridWorld, field: AttentionField) -> Self {
        let env = EnvRun::reset(world);
        Self {
            trajectory: vec![env.state.position],
            env,
            field,
            metrics: EpisodeMetrics::default(),
            discount: 1.0,
            pending: VecDeque::new(),
            notes: Vec::new(),
            rewards: Vec::new(),
        }
    }

    pub fn enqueue(&mut self, input: VerbalInput) {
        self.pending.push_back(input);
    }

    pub fn pending(&self) -> usize {
        self.pending.len()
    }

    pub fn is_done(&self) -> bool {
        self.env.done
    }

    pub fn state(&self) -> &AgentState {
        &self.env.state
    }

    pub fn env(&self) -> &EnvRun {
        &self.env
    }

    pub fn field(&self) -> &AttentionField {
        &self.field
    }

    pub fn metrics(&self) -> &EpisodeMetrics {
        &self.metrics
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn trajectory(&self) -> &[Cell] {
        &self.trajectory
    }

    /// Per-step rewards in order.
    pub fn rewards(&self) -> &[f64] {
        &self.rewards
    }

    pub fn into_field(self) -> AttentionField {
        self.field
    }

    pub fn epsilon(&self, setup: &EpisodeSetup<'_>, mode: Mode) -> f64 {
        match mode {
            Mode::Greedy => 0.0,
            Mode::Train { episode } => {
                let factor = if setup.attention { self.field.epsilon_factor() } else { 1.0 };
                epsilon_at(setup.params, episode, factor)
            }
        }
    }

    /// Reveals hidden markers and, with attention on, grounds the input and
    /// writes it into the field. Returns the applied records.
    pub fn process_verbal(&mut self, input: &VerbalInput, setup: &EpisodeSetup<'_>, extractor: &mut ContextExtractor) -> Vec<ContextRecord> {
        self.env.reveal();
        if !setup.attention {
            return Vec::new();
        }
        let ex = extractor.extract(input);
        self.field.apply(&ex.records);
        self.notes.extend(ex.notes);
        ex.records
    }

    pub fn step<R: Rng + ?Sized>(
        &mut self,
        agent: &mut Agent,
        setup: &EpisodeSetup<'_>,
        extractor: &mut ContextExtractor,
        mode: Mode,
        rng: &mut R,
    ) -> Result<StepRecord, AgentError> {
        let mut applied = Vec::new();
        while let Some(input) = self.pending.pop_front() {
            applied.extend(self.process_verbal(&input, setup, extractor));
        }

        let world = setup.world;
        let state = self.env.state;
        let s = state.index(world.width());
        let (t, strategy) = agent.route(&state, world, setup.space);
        let epsilon = self.epsilon(setup, mode);
        let field = setup.attention.then_some(&self.field);
        let table = &agent.tables[t];
        let sel = select_action(table.row(s), table.actions(), epsilon, field, &state, world, rng);
        if sel.boxed_in {
            self.notes.push(format!("boxed in at {}: avoid exclusion lifted for one step", state.position));
        }

        let outcome = self.env.step(world, sel.action, setup.rewards)?;

        let update = match mode {
            Mode::Greedy => None,
            Mode::Train { .. } => {
                // Truncation by the step budget still bootstraps; only a rescue is terminal.
                let terminal = outcome.rescued();
                let bootstrap = if terminal { 0.0 } else { agent.state_value(&outcome.next_state, world, setup.space) };
                let inputs = UpdateInputs { table: t, state: s, column: sel.column, reward: outcome.reward, bootstrap, terminal };
                td_update(&mut agent.tables[t], s, sel.column, outcome.reward, bootstrap, terminal, setup.params)?;
                Some(inputs)
            }
        };

        self.metrics.total_reward += outcome.reward;
        self.metrics.discounted_return += self.discount * outcome.reward;
        self.discount *= setup.params.gamma;
        self.metrics.steps += 1;
        if outcome.collided() {
            self.metrics.collisions += 1;
        }
        self.metrics.success |= outcome.rescued();
        self.rewards.push(outcome.reward);
        self.trajectory.push(outcome.next_state.position);
        self.field.visit(outcome.next_state.position);

        for event in &outcome.events {
            if let Event::VerbalTriggered { text, .. } = event {
                if let Some(input) = VerbalInput::new(text.clone(), VerbalSource::Scripted, self.env.steps) {
                    applied.extend(self.process_verbal(&input, setup, extractor));
                }
            }
        }

        Ok(StepRecord { strategy, action: sel.action, epsilon, explored: sel.explored, boxed_in: sel.boxed_in, outcome, update, applied })
    }
}

/// Everything an episode produced.
#[derive(Debug, Clone)]
pub struct EpisodeReport {
    pub metrics: EpisodeMetrics,
    pub rewards: Vec<f64>,
    pub trajectory: Vec<Cell>,
    pub notes: Vec<String>,
    pub field: AttentionField,
}

/// Runs one episode to completion. Inputs arriving on `queue` are drained
/// at step boundaries.
pub fn run_episode<R: Rng + ?Sized>(
    agent: &mut Agent,
    setup: &EpisodeSetup<'_>,
    extractor: &mut ContextExtractor,
    mut field: AttentionField,
    mode: Mode,
    rng: &mut R,
    queue: Option<&Receiver<VerbalInput>>,
) -> Result<EpisodeReport, AgentError> {
    field.reset_potentials();
    let mut ep = EpisodeLoop::new(setup.world, field);
    while !ep.is_done() {
        if let Some(rx) = queue {
            while let Ok(input) = rx.try_recv() {
                ep.enqueue(input);
            }
        }
        ep.step(agent, setup, extractor, mode, rng)?;
    }
    Ok(EpisodeReport {
        metrics: ep.metrics,
        rewards: ep.rewards,
        trajectory: ep.trajectory,
        notes: ep.notes,
        field: ep.field,
    })
}

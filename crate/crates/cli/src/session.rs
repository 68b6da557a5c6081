//! Steering sessions: one live episode that a human advances step by step and
//! feeds verbal input into between steps.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use sarhrl_core::agents::persist::{self, PersistError};
use sarhrl_core::agents::{Agent, AgentError, AgentKind, EpisodeLoop, EpisodeMetrics, EpisodeSetup, LearningParams, Mode, Strategy};
use sarhrl_core::attention::AttentionField;
use sarhrl_core::context::{
    extract_context, ContextExtractor, ContextRecord, ExtractorConfig, ExtractorService, HttpExtractorClient, InformationSpace, KbError,
    KnowledgeBase, VerbalInput, VerbalSource,
};
use sarhrl_core::env::{Cell, Event, GridWorld, InfoType, RewardMode, RewardModel, WorldError};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("invalid map: {0}")]
    Map(WorldError),
    #[error("invalid knowledge base: {0}")]
    Kb(KbError),
    #[error("file not found: {0}")]
    NotFound(PathBuf),
    #[error("replay_greedy sessions need a tables file")]
    MissingTables,
    #[error("unusable tables: {0}")]
    Tables(PersistError),
    #[error("requested kind {requested:?} but the tables hold a {found:?} agent")]
    KindMismatch { requested: AgentKind, found: AgentKind },
    #[error("text is empty")]
    EmptyText,
    #[error("episode is over")]
    Done,
    #[error(transparent)]
    Agent(#[from] AgentError),
}

impl SessionError {
    /// Violated invariant name for validation failures.
    pub fn invariant(&self) -> Option<&'static str> {
        match self {
            SessionError::Map(e) => Some(e.invariant()),
            SessionError::Kb(e) => Some(e.invariant()),
            SessionError::Tables(PersistError::MapMismatch { .. }) => Some("tables_match_map"),
            SessionError::Tables(_) => Some("well_formed_tables"),
            SessionError::KindMismatch { .. } => Some("kind_matches_tables"),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionMode {
    /// Epsilon-greedy with learning; epsilon from the schedule at `episode`.
    #[default]
    Train,
    /// Epsilon = 0 on loaded tables, no learning.
    ReplayGreedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    /// Waiting for the next advance. Steps only run inside an advance call,
    /// which holds the session lock, so readers never see a running session.
    Paused,
    Done,
}

/// Body of `POST /sessions`. Absent map/kb mean the shipped ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CreateRequest {
    #[serde(default)]
    pub map: Option<PathBuf>,
    #[serde(default)]
    pub kb: Option<PathBuf>,
    #[serde(default)]
    pub tables: Option<PathBuf>,
    #[serde(default)]
    pub mode: SessionMode,
    /// Agent kind for fresh tables; defaults to the tables' kind, else
    /// hierarchical.
    #[serde(default)]
    pub kind: Option<AgentKind>,
    /// Defaults to the tables' setting, else on.
    #[serde(default)]
    pub attention: Option<bool>,
    /// Defaults to the tables' setting, else intrinsic.
    #[serde(default)]
    pub reward_mode: Option<RewardMode>,
    #[serde(default)]
    pub seed: u64,
    /// Schedule position used for epsilon in train mode.
    #[serde(default)]
    pub episode: usize,
}

/// One executed step as recorded in the step log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub step: usize,
    pub strategy: Option<Strategy>,
    pub action: String,
    pub epsilon: f64,
    pub explored: bool,
    pub reward: f64,
    pub position: Cell,
    pub events: Vec<Event>,
    pub applied: Vec<ContextRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoPointView {
    pub cell: Cell,
    #[serde(rename = "type")]
    pub info_type: InfoType,
    pub collected: bool,
}

/// Static layout plus the markers the agent has been told about.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotations {
    pub start: Cell,
    pub victim: Cell,
    pub obstacles: Vec<Cell>,
    pub info_points: Vec<InfoPointView>,
    /// Empty until a verbal input reveals them.
    pub hazards: Vec<Cell>,
    pub points_of_interest: Vec<Cell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Flags {
    pub x: bool,
    pub y: bool,
    pub z: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialView {
    pub cell: Cell,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDims {
    pub width: usize,
    pub height: usize,
}

/// Response of `GET /sessions/{id}/state`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub session_id: String,
    pub mode: SessionMode,
    pub status: SessionStatus,
    pub kind: AgentKind,
    pub attention: bool,
    pub grid: GridDims,
    pub cells: Annotations,
    pub position: Cell,
    pub flags: Flags,
    pub victim_saved: bool,
    /// Manager's choice for the current state; null for the flat agent.
    pub strategy: Option<Strategy>,
    /// Epsilon the next step will use.
    pub epsilon: f64,
    pub potentials: Vec<PotentialView>,
    pub last_events: Vec<Event>,
    pub metrics: EpisodeMetrics,
    pub step_log_len: usize,
    pub pending_verbal: usize,
    pub trajectory: Vec<Cell>,
    pub notes: Vec<String>,
}

/// Response of `POST /sessions/{id}/verbal`: what the grammar backend makes
/// of the text. The text itself is applied at the next step boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerbalPreview {
    pub records: Vec<ContextRecord>,
    pub notes: Vec<String>,
    pub queued_at_step: usize,
}

pub struct Session {
    id: String,
    mode: SessionMode,
    world: GridWorld,
    kb: Arc<KnowledgeBase>,
    agent: Agent,
    rewards: RewardModel,
    params: LearningParams,
    space: InformationSpace,
    attention: bool,
    episode: usize,
    extractor: ContextExtractor,
    rng: ChaCha8Rng,
    ep: EpisodeLoop,
    step_log: Vec<StepSummary>,
}

fn ensure_exists(path: &Path) -> Result<(), SessionError> {
    if path.exists() {
        Ok(())
    } else {
        Err(SessionError::NotFound(path.to_owned()))
    }
}

impl Session {
    pub fn create(id: String, req: &CreateRequest) -> Result<Self, SessionError> {
        let world = match &req.map {
            Some(p) => {
                ensure_exists(p)?;
                GridWorld::load(p).map_err(SessionError::Map)?
            }
            None => GridWorld::default_map(),
        };
        let kb = match &req.kb {
            Some(p) => {
                ensure_exists(p)?;
                KnowledgeBase::load(p, Some(&world))
            }
            None => KnowledgeBase::default_for(&world),
        }
        .map_err(SessionError::Kb)?;

        let loaded = match (&req.tables, req.mode) {
            (Some(p), _) => {
                ensure_exists(p)?;
                Some(persist::load(p, &world).map_err(SessionError::Tables)?)
            }
            (None, SessionMode::ReplayGreedy) => return Err(SessionError::MissingTables),
            (None, SessionMode::Train) => None,
        };
        let (agent, attention, reward_mode) = match loaded {
            Some((header, agent)) => {
                if let Some(k) = req.kind.filter(|&k| k != header.kind) {
                    return Err(SessionError::KindMismatch { requested: k, found: header.kind });
                }
                (agent, req.attention.unwrap_or(header.attention), req.reward_mode.unwrap_or(header.reward_mode))
            }
            None => (
                Agent::new(req.kind.unwrap_or(AgentKind::Hierarchical), &world),
                req.attention.unwrap_or(true),
                req.reward_mode.unwrap_or(RewardMode::Intrinsic),
            ),
        };

        let kb = Arc::new(kb);
        let extractor = match HttpExtractorClient::new(&ExtractorConfig::default().with_env()) {
            Ok(client) => ContextExtractor::with_service(kb.clone(), Arc::new(client) as Arc<dyn ExtractorService + Send + Sync>),
            Err(_) => ContextExtractor::grammar(kb.clone()),
        };
        let ep = EpisodeLoop::new(&world, AttentionField::default());
        Ok(Self {
            id,
            mode: req.mode,
            kb,
            agent,
            rewards: RewardModel::for_mode(reward_mode),
            params: LearningParams::default(),
            space: InformationSpace::default(),
            attention,
            episode: req.episode,
            extractor,
            rng: ChaCha8Rng::seed_from_u64(req.seed),
            ep,
            step_log: Vec::new(),
            world,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn status(&self) -> SessionStatus {
        if self.ep.is_done() {
            SessionStatus::Done
        } else {
            SessionStatus::Paused
        }
    }

    fn loop_mode(&self) -> Mode {
        match self.mode {
            SessionMode::Train => Mode::Train { episode: self.episode },
            SessionMode::ReplayGreedy => Mode::Greedy,
        }
    }

    fn setup(&self) -> EpisodeSetup<'_> {
        EpisodeSetup { world: &self.world, rewards: &self.rewards, params: &self.params, space: &self.space, attention: self.attention }
    }

    /// Queues `text` for the next step boundary and previews its grammar
    /// records. Sending the same text twice is harmless: applying the same
    /// records again leaves the field unchanged.
    pub fn post_verbal(&mut self, text: &str) -> Result<VerbalPreview, SessionError> {
        let step = self.ep.env().steps;
        let input = VerbalInput::new(text, VerbalSource::Human, step).ok_or(SessionError::EmptyText)?;
        if self.ep.is_done() {
            return Err(SessionError::Done);
        }
        let preview = extract_context(&input, &self.kb);
        self.ep.enqueue(input);
        Ok(VerbalPreview { records: preview.records, notes: preview.notes, queued_at_step: step })
    }

    /// Runs up to `steps` steps, stopping early at episode end. Not
    /// idempotent.
    pub fn advance(&mut self, steps: usize) -> Result<usize, SessionError> {
        if self.ep.is_done() {
            return Err(SessionError::Done);
        }
        let mode = self.loop_mode();
        let mut done = 0;
        while done < steps && !self.ep.is_done() {
            let setup = EpisodeSetup { world: &self.world, rewards: &self.rewards, params: &self.params, space: &self.space, attention: self.attention };
            let rec = self.ep.step(&mut self.agent, &setup, &mut self.extractor, mode, &mut self.rng)?;
            self.step_log.push(StepSummary {
                step: self.step_log.len() + 1,
                strategy: rec.strategy,
                action: rec.action.label().to_owned(),
                epsilon: rec.epsilon,
                explored: rec.explored,
                reward: rec.outcome.reward,
                position: rec.outcome.next_state.position,
                events: rec.outcome.events,
                applied: rec.applied,
            });
            done += 1;
        }
        Ok(done)
    }

    pub fn step_log(&self) -> &[StepSummary] {
        &self.step_log
    }

    pub fn state(&self) -> StateDocument {
        let w = &self.world;
        let s = self.ep.state();
        let env = self.ep.env();
        let field = self.ep.field();
        StateDocument {
            session_id: self.id.clone(),
            mode: self.mode,
            status: self.status(),
            kind: self.agent.kind(),
            attention: self.attention,
            grid: GridDims { width: w.width(), height: w.height() },
            cells: Annotations {
                start: w.start(),
                victim: w.victim(),
                obstacles: w.obstacles().to_vec(),
                info_points: InfoType::ALL
                    .iter()
                    .map(|&t| InfoPointView { cell: w.info_point(t), info_type: t, collected: s.has(t) })
                    .collect(),
                hazards: env.visible_hazards(w).to_vec(),
                points_of_interest: env.visible_points_of_interest(w).to_vec(),
            },
            position: s.position,
            flags: Flags { x: s.info_flags[0], y: s.info_flags[1], z: s.info_flags[2] },
            victim_saved: s.victim_saved,
            strategy: self.agent.route(s, w, &self.space).1,
            epsilon: self.ep.epsilon(&self.setup(), self.loop_mode()),
            potentials: field.potentials().iter().map(|(&cell, &value)| PotentialView { cell, value }).collect(),
            last_events: self.step_log.last().map(|s| s.events.clone()).unwrap_or_default(),
            metrics: *self.ep.metrics(),
            step_log_len: self.step_log.len(),
            pending_verbal: self.ep.pending(),
            trajectory: self.ep.trajectory().to_vec(),
            notes: self.ep.notes().to_vec(),
        }
    }
}

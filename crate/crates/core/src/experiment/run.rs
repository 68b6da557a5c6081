use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::agents::{run_episode, Agent, AgentError, EpisodeMetrics, EpisodeSetup, LearningParams, Mode};
use crate::attention::{AttentionConfig, AttentionField};
use crate::context::{ContextExtractor, ExtractorService, HttpExtractorClient, InformationSpace, KnowledgeBase};
use crate::env::{Cell, GridWorld, RewardModel};

use super::{AggregateCurve, ExperimentConfig, ExperimentError, Variant};

/// Loaded inputs shared read-only by every run of an experiment.
#[derive(Clone)]
pub struct Resources {
    pub world: GridWorld,
    pub kb: Arc<KnowledgeBase>,
    pub rewards: RewardModel,
    pub space: InformationSpace,
    pub attention: AttentionConfig,
    pub service: Option<Arc<dyn ExtractorService + Send + Sync>>,
}

impl Resources {
    pub fn load(config: &ExperimentConfig) -> Result<Self, ExperimentError> {
        config.validate()?;
        let world = match &config.map {
            Some(path) => GridWorld::load(path)?,
            None => GridWorld::default_map(),
        };
        let kb = match &config.kb {
            Some(path) => KnowledgeBase::load(path, Some(&world))?,
            None => KnowledgeBase::default_for(&world)?,
        };
        let service = HttpExtractorClient::new(&config.extractor.clone().with_env())
            .ok()
            .map(|c| Arc::new(c) as Arc<dyn ExtractorService + Send + Sync>);
        Ok(Self {
            world,
            kb: Arc::new(kb),
            rewards: config.reward_model(),
            space: InformationSpace::default(),
            attention: config.attention,
            service,
        })
    }

    /// Shipped map and kb with the given reward model, grammar extraction.
    pub fn shipped(rewards: RewardModel) -> Self {
        Self {
            world: GridWorld::default_map(),
            kb: Arc::new(KnowledgeBase::default_kb()),
            rewards,
            space: InformationSpace::default(),
            attention: AttentionConfig::default(),
            service: None,
        }
    }

    pub fn extractor(&self) -> ContextExtractor {
        match &self.service {
            Some(svc) => ContextExtractor::with_service(self.kb.clone(), svc.clone()),
            None => ContextExtractor::grammar(self.kb.clone()),
        }
    }

    fn setup<'a>(&'a self, params: &'a LearningParams, attention: bool) -> EpisodeSetup<'a> {
        EpisodeSetup { world: &self.world, rewards: &self.rewards, params, space: &self.space, attention }
    }
}

/// One seeded training run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub seed: u64,
    pub episodes: Vec<EpisodeMetrics>,
    pub agent: Agent,
}

impl RunResult {
    pub fn rewards(&self) -> Vec<f64> {
        self.episodes.iter().map(|m| m.total_reward).collect()
    }

    /// Success rate over the last `n` episodes.
    pub fn final_success_rate(&self, n: usize) -> f64 {
        let tail = &self.episodes[self.episodes.len().saturating_sub(n)..];
        tail.iter().filter(|m| m.success).count() as f64 / tail.len().max(1) as f64
    }
}

/// Trains a fresh agent of `variant` for `params.episodes` episodes with the
/// RNG stream `seed`.
pub fn train_run(res: &Resources, variant: Variant, params: &LearningParams, seed: u64) -> Result<RunResult, AgentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agent = Agent::new(variant.kind(), &res.world);
    let mut extractor = res.extractor();
    let setup = res.setup(params, variant.attention());
    let mut field = AttentionField::new(res.attention);
    let mut episodes = Vec::with_capacity(params.episodes);
    for episode in 0..params.episodes {
        let report = run_episode(&mut agent, &setup, &mut extractor, field, Mode::Train { episode }, &mut rng, None)?;
        field = report.field;
        episodes.push(report.metrics);
    }
    Ok(RunResult { seed, episodes, agent })
}

/// All runs of an experiment plus their aggregate.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub world: GridWorld,
    pub runs: Vec<RunResult>,
    pub curve: AggregateCurve,
}

fn collect(config: &ExperimentConfig, res: Resources, runs: Vec<RunResult>) -> Experiment {
    let curves: Vec<Vec<EpisodeMetrics>> = runs.iter().map(|r| r.episodes.clone()).collect();
    Experiment { config: config.clone(), world: res.world, curve: AggregateCurve::from_runs(&curves), runs }
}

fn seeded(config: &ExperimentConfig, res: &Resources, i: usize) -> Result<RunResult, ExperimentError> {
    let seed = config.seed.wrapping_add(i as u64);
    train_run(res, config.variant, &config.params, seed).map_err(|source| ExperimentError::Run { seed, source })
}

/// Runs every seed on the calling thread.
pub fn run_experiment_sequential(config: &ExperimentConfig) -> Result<Experiment, ExperimentError> {
    let res = Resources::load(config)?;
    let runs = (0..config.runs).map(|i| seeded(config, &res, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(collect(config, res, runs))
}

/// Runs seeds `seed..seed + runs`, in parallel when the `parallel` feature
/// is on. Results do not depend on scheduling.
#[cfg(feature = "parallel")]
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment, ExperimentError> {
    use rayon::prelude::*;

    let res = Resources::load(config)?;
    let runs = (0..config.runs).into_par_iter().map(|i| seeded(config, &res, i)).collect::<Result<Vec<_>, _>>()?;
    Ok(collect(config, res, runs))
}

#[cfg(not(feature = "parallel"))]
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment, ExperimentError> {
    run_experiment_sequential(config)
}

/// Greedy-policy evaluation of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyEval {
    pub steps: usize,
    pub collisions: usize,
    pub success: bool,
    pub total_reward: f64,
    pub trajectory: Vec<Cell>,
}

/// One epsilon = 0 episode with the map's scripted verbal inputs. Tables are
/// not modified; a failed rescue is reported, not raised.
pub fn evaluate_greedy(agent: &Agent, res: &Resources, attention: bool) -> Result<GreedyEval, AgentError> {
    let params = LearningParams::default();
    let setup = res.setup(&params, attention);
    let mut agent = agent.clone();
    let mut extractor = res.extractor();
    // epsilon is 0, so the stream is never drawn from
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let report = run_episode(&mut agent, &setup, &mut extractor, AttentionField::new(res.attention), Mode::Greedy, &mut rng, None)?;
    Ok(GreedyEval {
        steps: report.metrics.steps,
        collisions: report.metrics.collisions,
        success: report.metrics.success,
        total_reward: report.metrics.total_reward,
        trajectory: report.trajectory,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::AgentKind;
    use crate::env::RewardMode;

    fn tiny(variant: Variant, episodes: usize, runs: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig::reference(variant);
        c.params.episodes = episodes;
        c.runs = runs;
        c.seed = 7;
        c
    }

    #[test]
    fn smallest_experiment() {
        for v in Variant::ALL {
            let e = run_experiment(&tiny(v, 1, 1)).unwrap();
            assert_eq!(e.curve.len(), 1);
            assert_eq!(e.runs.len(), 1);
        }
    }

    #[test]
    fn same_seed_same_curves() {
        let c = tiny(Variant::HrlAtt, 30, 3);
        let a = run_experiment(&c).unwrap();
        let b = run_experiment(&c).unwrap();
        assert_eq!(a.curve, b.curve);
        for (x, y) in a.runs.iter().zip(&b.runs) {
            assert_eq!(x.episodes, y.episodes);
            assert_eq!(x.agent, y.agent);
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let c = tiny(Variant::FlatAtt, 20, 4);
        let par = run_experiment(&c).unwrap();
        let seq = run_experiment_sequential(&c).unwrap();
        assert_eq!(par.curve, seq.curve);
        assert_eq!(par.runs.iter().map(|r| r.seed).collect::<Vec<_>>(), vec![7, 8, 9, 10]);
    }

    #[test]
    fn untrained_tables_fail_within_budget() {
        let res = Resources::shipped(RewardModel::sparse());
        for kind in [AgentKind::Flat, AgentKind::Hierarchical] {
            let eval = evaluate_greedy(&Agent::new(kind, &res.world), &res, false).unwrap();
            assert!(!eval.success);
            assert_eq!(eval.steps, res.world.max_steps());
        }
    }

    #[test]
    fn missing_map_is_a_load_error() {
        let mut c = tiny(Variant::Hrl, 1, 1);
        c.map = Some("/nonexistent/map.json".into());
        assert!(matches!(run_experiment(&c), Err(ExperimentError::World(_))));
        assert_eq!(c.reward_mode, RewardMode::Sparse);
    }
}

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardMode {
    /// Intermediate rewards for collection plus penalties.
    Intrinsic,
    /// Reward only on rescue.
    Sparse,
}

/// Per-event reward magnitudes. Every step additionally pays `step_cost`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardModel {
    pub mode: RewardMode,
    pub step_cost: f64,
    pub blocked_penalty: f64,
    pub collision_penalty: f64,
    pub collect_reward: f64,
    pub wrong_action_penalty: f64,
    pub rescue_reward: f64,
}

impl RewardModel {
    /// Default intrinsic magnitudes. Entering a hazard costs less than the
    /// two-step detour around the shipped map's hazards, so an agent that
    /// ignores verbal context learns to cut through them.
    pub fn intrinsic() -> Self {
        Self {
            mode: RewardMode::Intrinsic,
            step_cost: -1.0,
            blocked_penalty: -2.0,
            collision_penalty: -1.0,
            collect_reward: 20.0,
            wrong_action_penalty: -5.0,
            rescue_reward: 100.0,
        }
    }

    pub fn sparse() -> Self {
        Self {
            mode: RewardMode::Sparse,
            step_cost: 0.0,
            blocked_penalty: 0.0,
            collision_penalty: 0.0,
            collect_reward: 0.0,
            wrong_action_penalty: 0.0,
            rescue_reward: 100.0,
        }
    }

    pub fn for_mode(mode: RewardMode) -> Self {
        match mode {
            RewardMode::Intrinsic => Self::intrinsic(),
            RewardMode::Sparse => Self::sparse(),
        }
    }

    /// Checks the sign/ordering constraints of the model's mode.
    pub fn is_consistent(&self) -> bool {
        match self.mode {
            RewardMode::Sparse => {
                self.rescue_reward > 0.0
                    && [self.step_cost, self.blocked_penalty, self.collision_penalty, self.collect_reward, self.wrong_action_penalty]
                        .iter()
                        .all(|&v| v == 0.0)
            }
            RewardMode::Intrinsic => {
                self.rescue_reward > self.collect_reward
                    && self.collect_reward > 0.0
                    && [self.step_cost, self.blocked_penalty, self.collision_penalty, self.wrong_action_penalty]
                        .iter()
                        .all(|&v| v < 0.0)
            }
        }
    }
}

use serde::{Deserialize, Serialize};

/// Q-learning hyperparameters and the exploration schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LearningParams {
    pub gamma: f64,
    pub alpha: f64,
    pub episodes: usize,
    pub epsilon_start: f64,
    pub epsilon_min: f64,
    pub decay_rate: f64,
}

impl Default for LearningParams {
    fn default() -> Self {
        Self { gamma: 0.998, alpha: 0.1, episodes: 1500, epsilon_start: 1.0, epsilon_min: 0.01, decay_rate: 2.0 }
    }
}

impl LearningParams {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(format!("gamma {} outside (0, 1]", self.gamma));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(format!("alpha {} outside (0, 1]", self.alpha));
        }
        if self.episodes == 0 {
            return Err("episodes must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.epsilon_min) || !(self.epsilon_min..=1.0).contains(&self.epsilon_start) {
            return Err("need 0 <= epsilon_min <= epsilon_start <= 1".into());
        }
        if self.decay_rate <= 0.0 {
            return Err("decay_rate must be positive".into());
        }
        Ok(())
    }
}

/// Linear decay from `epsilon_start` to `epsilon_min`, reached after
/// `episodes / (decay_rate * factor)` episodes and held thereafter.
pub fn epsilon_at(params: &LearningParams, episode: usize, factor: f64) -> f64 {
    let progress = episode as f64 * params.decay_rate * factor / params.episodes as f64;
    if progress >= 1.0 {
        params.epsilon_min
    } else {
        (params.epsilon_start - (params.epsilon_start - params.epsilon_min) * progress).max(params.epsilon_min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_examples() {
        let p = LearningParams::default();
        assert_eq!(epsilon_at(&p, 0, 1.0), 1.0);
        assert_eq!(epsilon_at(&p, 750, 1.0), 0.01);
        assert!(epsilon_at(&p, 749, 1.0) > 0.01);
        assert_eq!(epsilon_at(&p, 1499, 1.0), 0.01);
        assert_eq!(epsilon_at(&p, 1499, 2.0), 0.01);
        assert_eq!(epsilon_at(&p, 375, 2.0), 0.01);
        assert!(epsilon_at(&p, 374, 2.0) > 0.01);
    }

    #[test]
    fn schedule_matches_closed_form() {
        let p = LearningParams::default();
        let k = (p.epsilon_start - p.epsilon_min) * p.decay_rate / p.episodes as f64;
        for e in 0..p.episodes {
            for factor in [1.0, 2.0] {
                let closed = (p.epsilon_start - e as f64 * k * factor).max(p.epsilon_min);
                assert!((epsilon_at(&p, e, factor) - closed).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn validation() {
        assert!(LearningParams::default().validate().is_ok());
        assert!(LearningParams { gamma: 1.5, ..Default::default() }.validate().is_err());
        assert!(LearningParams { episodes: 0, ..Default::default() }.validate().is_err());
    }
}

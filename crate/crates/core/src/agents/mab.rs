use rand::Rng;

use super::dnn::argmax;
use super::schedule::epsilon_at;
use crate::config::Schedule;

/// Context-free epsilon-greedy bandit over the `2^M` configurations, with a
/// constant-step value update.
#[derive(Debug, Clone, PartialEq)]
pub struct MabAgent {
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
    pub step: f64,
    pub events: u64,
    schedule: Schedule,
}

impl MabAgent {
    pub fn new(arms: usize, step: f64, schedule: Schedule) -> Self {
        Self {
            values: vec![0.0; arms],
            counts: vec![0; arms],
            step,
            events: 0,
            schedule,
        }
    }

    pub fn epsilon(&self) -> f64 {
        epsilon_at(self.events, &self.schedule)
    }

    pub fn select<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        select_action_mab(&self.values, self.epsilon(), rng)
    }

    pub fn update(&mut self, action: usize, reward: f64) {
        mab_update(&mut self.values, action, reward, self.step);
        self.counts[action] += 1;
    }

    pub fn end_event(&mut self) {
        self.events += 1;
    }
}

pub fn select_action_mab<R: Rng + ?Sized>(values: &[f64], eps: f64, rng: &mut R) -> usize {
    if rng.random::<f64>() < eps {
        return rng.random_range(0..values.len());
    }
    argmax(values.into())
}

/// `Q(a) ← Q(a) + step · (r - Q(a))`.
pub fn mab_update(values: &mut [f64], action: usize, reward: f64, step: f64) {
    values[action] += step * (reward - values[action]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn all_zero_values_pick_first_arm() {
        let mut rng = stream(1, Stream::Exploration);
        assert_eq!(select_action_mab(&[0.0; 8], 0.0, &mut rng), 0);
    }

    #[test]
    fn greedy_picks_best_arm() {
        let mut rng = stream(1, Stream::Exploration);
        assert_eq!(select_action_mab(&[0.0, 0.5], 0.0, &mut rng), 1);
    }

    #[test]
    fn one_step_update() {
        let mut q = vec![0.0, 0.0];
        mab_update(&mut q, 1, 1.0, 0.1);
        assert!((q[1] - 0.1).abs() < 1e-15);
        assert_eq!(q[0], 0.0);
    }

    #[test]
    fn agent_tracks_counts_and_events() {
        let mut a = MabAgent::new(4, 0.1, Schedule::default());
        a.update(2, -1.0);
        a.update(2, 1.0);
        a.end_event();
        assert_eq!(a.counts, vec![0, 0, 2, 0]);
        assert_eq!(a.events, 1);
        assert!(a.values.iter().all(|v| v.is_finite()));
        assert!((a.values[2] - (-0.1 + 0.1 * 1.1)).abs() < 1e-15);
    }
}

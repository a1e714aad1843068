//! Access policies: the contention-signature DNN agent and the MAB-RA and RCH
//! baselines, plus reward assignment.

mod dnn;
mod mab;
mod rch;
mod schedule;

pub use dnn::{argmax, select_action_dnn, DnnAgent};
pub use mab::{mab_update, select_action_mab, MabAgent};
pub use rch::select_action_rch;
pub use schedule::{epsilon_at, lr_at};

use rand::Rng;

use crate::access::AccessConfig;
use crate::config::{PolicyKind, SimConfig};

/// +1 for an update delivered within its deadline, -1 otherwise.
pub fn reward_for(delivered_within_deadline: bool) -> i8 {
    if delivered_within_deadline {
        1
    } else {
        -1
    }
}

/// Per-LAP policy state.
#[derive(Debug, Clone)]
pub enum PolicyState {
    Dnn(Box<DnnAgent>),
    Mab(MabAgent),
    Rch,
    Fixed(usize),
}

impl PolicyState {
    pub fn new<R: Rng + ?Sized>(cfg: &SimConfig, init_rng: &mut R) -> Self {
        match cfg.policy {
            PolicyKind::Dnn => PolicyState::Dnn(Box::new(DnnAgent::new(
                cfg.m,
                cfg.hidden,
                cfg.replay_capacity,
                cfg.batch,
                cfg.schedule,
                init_rng,
            ))),
            PolicyKind::Mab => {
                PolicyState::Mab(MabAgent::new(cfg.actions(), cfg.mab_step, cfg.schedule))
            }
            PolicyKind::Rch => PolicyState::Rch,
            PolicyKind::Fixed(i) => PolicyState::Fixed(i),
        }
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            PolicyState::Dnn(_) => PolicyKind::Dnn,
            PolicyState::Mab(_) => PolicyKind::Mab,
            PolicyState::Rch => PolicyKind::Rch,
            PolicyState::Fixed(i) => PolicyKind::Fixed(*i),
        }
    }

    /// Choose a configuration for one transmission attempt.
    pub fn select<R: Rng + ?Sized>(
        &mut self,
        features: &[f64],
        channels: usize,
        rng: &mut R,
    ) -> AccessConfig {
        let index = match self {
            PolicyState::Dnn(agent) => agent.select(features, rng),
            PolicyState::Mab(agent) => agent.select(rng),
            PolicyState::Rch => return select_action_rch(channels, rng),
            PolicyState::Fixed(i) => *i,
        };
        AccessConfig::from_index(index, channels).expect("policy index in range")
    }

    /// Feedback for one attempt.
    pub fn observe(&mut self, features: &[f64], action: AccessConfig, reward: i8) {
        match self {
            PolicyState::Dnn(agent) => agent.observe(features, action.index(), f64::from(reward)),
            PolicyState::Mab(agent) => agent.update(action.index(), f64::from(reward)),
            PolicyState::Rch | PolicyState::Fixed(_) => {}
        }
    }

    /// Close an alarm event the agent acted in.
    pub fn end_event<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        match self {
            PolicyState::Dnn(agent) => {
                agent.end_event(rng);
            }
            PolicyState::Mab(agent) => agent.end_event(),
            PolicyState::Rch | PolicyState::Fixed(_) => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn rewards() {
        assert_eq!(reward_for(true), 1);
        assert_eq!(reward_for(false), -1);
    }

    #[test]
    fn rch_policy_never_silent_or_multi_channel() {
        let cfg = SimConfig {
            policy: PolicyKind::Rch,
            m: 4,
            ..SimConfig::default()
        };
        let mut p = PolicyState::new(&cfg, &mut stream(1, Stream::Init));
        let mut rng = stream(1, Stream::Exploration);
        for _ in 0..1000 {
            assert_eq!(p.select(&[], 4, &mut rng).count_ones(), 1);
        }
    }

    #[test]
    fn fixed_policy_repeats() {
        let mut p = PolicyState::Fixed(3);
        let mut rng = stream(1, Stream::Exploration);
        assert_eq!(p.select(&[], 2, &mut rng).index(), 3);
        assert_eq!(p.kind(), PolicyKind::Fixed(3));
    }
}

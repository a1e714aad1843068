use ndarray::ArrayView1;
use rand::Rng;

use super::schedule::{epsilon_at, lr_at};
use crate::config::Schedule;
use crate::neural::{train_step, Mlp, ReplayMemory, ReplayTuple, RmsPropState};

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: ArrayView1<'_, f64>) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Epsilon-greedy over the network's action values for `features`.
///
/// One uniform draw decides exploration; exploring draws a second uniform
/// index over all configurations.
pub fn select_action_dnn<R: Rng + ?Sized>(
    features: &[f64],
    net: &Mlp,
    eps: f64,
    rng: &mut R,
) -> usize {
    if rng.random::<f64>() < eps {
        return rng.random_range(0..net.outputs());
    }
    let values = net.forward(features).expect("features match network input");
    argmax(values.view())
}

/// The proposed agent: network, replay memory, optimizer and event counter.
#[derive(Debug, Clone)]
pub struct DnnAgent {
    pub net: Mlp,
    pub memory: ReplayMemory,
    pub opt: RmsPropState,
    pub batch: usize,
    pub events: u64,
    lr0: f64,
    schedule: Schedule,
    /// Greedy choice for the features seen last; the net only changes at
    /// event close so this is reused across retransmissions.
    greedy_cache: Option<(Vec<f64>, usize)>,
}

impl DnnAgent {
    pub fn new<R: Rng + ?Sized>(
        channels: usize,
        hidden: usize,
        capacity: usize,
        batch: usize,
        schedule: Schedule,
        init_rng: &mut R,
    ) -> Self {
        let net = Mlp::new(2 * channels, hidden, 1 << channels, init_rng);
        let opt = RmsPropState::new(&net, schedule.lr_start);
        Self {
            net,
            memory: ReplayMemory::new(capacity),
            opt,
            batch,
            events: 0,
            lr0: schedule.lr_start,
            schedule,
            greedy_cache: None,
        }
    }

    pub fn epsilon(&self) -> f64 {
        epsilon_at(self.events, &self.schedule)
    }

    pub fn select<R: Rng + ?Sized>(&mut self, features: &[f64], rng: &mut R) -> usize {
        if rng.random::<f64>() < self.epsilon() {
            return rng.random_range(0..self.net.outputs());
        }
        match &self.greedy_cache {
            Some((f, a)) if f.as_slice() == features => *a,
            _ => {
                let a = argmax(self.net.forward(features).expect("feature width").view());
                self.greedy_cache = Some((features.to_vec(), a));
                a
            }
        }
    }

    pub fn observe(&mut self, features: &[f64], action: usize, reward: f64) {
        self.memory
            .push(ReplayTuple::new(features.to_vec(), action, reward));
    }

    /// Close an alarm event: advance the schedules and train once.
    pub fn end_event<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<f64> {
        self.events += 1;
        self.opt.lr = lr_at(self.events, self.lr0, &self.schedule);
        let loss = train_step(&mut self.net, &self.memory, self.batch, &mut self.opt, rng);
        if loss.is_some() {
            self.greedy_cache = None;
        }
        loss
    }
}

use std::collections::VecDeque;

use rand::Rng;

/// One stored experience: observed features, chosen configuration index and
/// the reward it earned.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayTuple {
    pub features: Vec<f64>,
    pub action: usize,
    pub reward: f64,
}

impl ReplayTuple {
    pub fn new(features: Vec<f64>, action: usize, reward: f64) -> Self {
        Self {
            features,
            action,
            reward,
        }
    }
}

/// Bounded FIFO of experiences; the oldest tuple is evicted when full.
#[derive(Debug, Clone)]
pub struct ReplayMemory {
    buf: VecDeque<ReplayTuple>,
    capacity: usize,
}

impl ReplayMemory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            buf: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buf.is_empty()
    }

    pub fn push(&mut self, tuple: ReplayTuple) {
        if self.buf.len() == self.capacity {
            self.buf.pop_front();
        }
        self.buf.push_back(tuple);
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &ReplayTuple> {
        self.buf.iter()
    }

    /// `batch` distinct tuples drawn uniformly, or `None` while fewer than
    /// `batch` are stored.
    pub fn sample_minibatch<R: Rng + ?Sized>(
        &self,
        batch: usize,
        rng: &mut R,
    ) -> Option<Vec<&ReplayTuple>> {
        if batch == 0 || self.buf.len() < batch {
            return None;
        }
        Some(
            rand::seq::index::sample(rng, self.buf.len(), batch)
                .into_iter()
                .map(|i| &self.buf[i])
                .collect(),
        )
    }
}

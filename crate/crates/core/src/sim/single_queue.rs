//! One FIFO queue with Bernoulli arrivals and Bernoulli service, no deadline.
//!
//! Each slot an arrival (if any) joins first, then the head is served with
//! probability `lambda`. Occupancy is observed after the arrival.

use std::collections::VecDeque;

use rand::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct SingleQueueStats {
    pub slots: u64,
    pub departures: u64,
    /// `occupancy[j]`: slots observed with `j` updates queued.
    pub occupancy: Vec<u64>,
    /// `delays[t]`: departures with delay `t`, for `t` below the histogram length.
    pub delays: Vec<u64>,
    /// Departures with delay at or beyond the histogram length.
    pub delay_overflow: u64,
}

impl SingleQueueStats {
    pub fn occupancy_frequency(&self, j: usize) -> f64 {
        self.occupancy.get(j).copied().unwrap_or(0) as f64 / self.slots as f64
    }

    pub fn delay_frequency(&self, t: usize) -> f64 {
        self.delays.get(t).copied().unwrap_or(0) as f64 / self.departures as f64
    }

    /// Fraction of updates whose delay exceeds `d` slots.
    pub fn violation_frequency(&self, d: usize) -> f64 {
        let within: u64 = self.delays.iter().take(d + 1).sum();
        (self.departures - within) as f64 / self.departures as f64
    }
}

/// Run until `updates` updates have departed.
pub fn simulate_single_queue<R: Rng + ?Sized>(
    p_arr: f64,
    lambda: f64,
    updates: u64,
    max_delay: usize,
    rng: &mut R,
) -> SingleQueueStats {
    let mut queue: VecDeque<u64> = VecDeque::new();
    let mut stats = SingleQueueStats {
        slots: 0,
        departures: 0,
        occupancy: Vec::new(),
        delays: vec![0; max_delay + 1],
        delay_overflow: 0,
    };
    let mut slot = 0u64;
    while stats.departures < updates {
        if rng.random_bool(p_arr) {
            queue.push_back(slot);
        }
        let len = queue.len();
        if stats.occupancy.len() <= len {
            stats.occupancy.resize(len + 1, 0);
        }
        stats.occupancy[len] += 1;
        if len > 0 && rng.random_bool(lambda) {
            let arrived = queue.pop_front().expect("non-empty");
            let delay = (slot + 1 - arrived) as usize;
            match stats.delays.get_mut(delay) {
                Some(c) => *c += 1,
                None => stats.delay_overflow += 1,
            }
            stats.departures += 1;
        }
        slot += 1;
    }
    stats.slots = slot;
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn instant_service_has_unit_delay() {
        let s = simulate_single_queue(0.3, 1.0, 10_000, 10, &mut stream(1, Stream::Arrivals));
        assert_eq!(s.delays[1], 10_000);
        assert_eq!(s.violation_frequency(1), 0.0);
    }

    #[test]
    fn counts_are_consistent() {
        let s = simulate_single_queue(0.2, 0.5, 50_000, 40, &mut stream(2, Stream::Arrivals));
        assert_eq!(s.occupancy.iter().sum::<u64>(), s.slots);
        assert_eq!(
            s.delays.iter().sum::<u64>() + s.delay_overflow,
            s.departures
        );
        assert_eq!(s.delays[0], 0);
    }
}

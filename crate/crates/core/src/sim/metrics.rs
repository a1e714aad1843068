//! Per-run counters and the summary written to CSV.

use std::fmt;

use crate::config::{PolicyKind, SimConfig};
use crate::update::Update;

/// Column names of [`RunMetrics::csv_row`].
pub const METRICS_HEADER: &str =
    "method,K,M,p_act,p_arr,D,seed,horizon,P_timely,mean_delay,collision_rate";

/// Running tallies for one simulation.
///
/// Timeliness and delay are measured over updates generated in
/// `[window_start, window_end)`; every such update has had its deadline
/// resolved by the end of the run. Attempts are counted from `window_start`.
#[derive(Debug, Clone)]
pub struct MetricsAccumulator {
    deadline: u32,
    window_start: u64,
    window_end: u64,
    pub generated: u64,
    pub delivered: u64,
    pub late: u64,
    pub dropped_deadline: u64,
    pub dropped_overflow: u64,
    pub window_generated: u64,
    pub window_timely: u64,
    pub window_delivered: u64,
    pub window_delay_sum: u64,
    /// Index `t - 1` counts window updates delivered with delay `t ≤ D`.
    pub delay_hist: Vec<u64>,
    pub attempts: u64,
    pub collided: u64,
    pub silent_attempts: u64,
    pub events: u64,
    pub rewards: Vec<i8>,
}

impl MetricsAccumulator {
    pub fn new(deadline: u32, horizon: u64, warmup_slots: u64) -> Self {
        let (window_start, window_end) = measurement_window(deadline, horizon, warmup_slots);
        Self {
            deadline,
            window_start,
            window_end,
            generated: 0,
            delivered: 0,
            late: 0,
            dropped_deadline: 0,
            dropped_overflow: 0,
            window_generated: 0,
            window_timely: 0,
            window_delivered: 0,
            window_delay_sum: 0,
            delay_hist: vec![0; deadline as usize + 1],
            attempts: 0,
            collided: 0,
            silent_attempts: 0,
            events: 0,
            rewards: Vec::new(),
        }
    }

    pub fn window(&self) -> (u64, u64) {
        (self.window_start, self.window_end)
    }

    fn in_window(&self, u: &Update) -> bool {
        (self.window_start..self.window_end).contains(&u.generation_slot)
    }

    pub fn on_generated(&mut self, u: &Update) {
        self.generated += 1;
        if self.in_window(u) {
            self.window_generated += 1;
        }
    }

    pub fn on_delivered(&mut self, u: &Update) {
        self.delivered += 1;
        let timely = u.is_timely(self.deadline);
        if !timely {
            self.late += 1;
        }
        if self.in_window(u) {
            let t = u.delay().expect("delivered update has a delay");
            self.window_delivered += 1;
            self.window_delay_sum += t;
            if timely {
                self.window_timely += 1;
                self.delay_hist[t as usize - 1] += 1;
            } else {
                self.delay_hist[self.deadline as usize] += 1;
            }
        }
    }

    pub fn on_attempt(&mut self, slot: u64, silent: bool, success: bool) {
        if slot < self.window_start {
            return;
        }
        if silent {
            self.silent_attempts += 1;
        } else {
            self.attempts += 1;
            if !success {
                self.collided += 1;
            }
        }
    }

    pub fn on_event_closed(&mut self, reward: i8) {
        self.events += 1;
        self.rewards.push(reward);
    }

    pub fn summary(&self, cfg: &SimConfig, horizon: u64, queued_at_end: u64) -> RunMetrics {
        RunMetrics {
            method: cfg.policy,
            k: cfg.k,
            m: cfg.m,
            p_act: cfg.p_act,
            p_arr: cfg.p_arr,
            deadline: cfg.deadline,
            seed: cfg.seed,
            horizon,
            p_timely: ratio(self.window_timely, self.window_generated),
            mean_delay: ratio(self.window_delay_sum, self.window_delivered),
            collision_rate: ratio(self.collided, self.attempts),
            generated: self.generated,
            delivered: self.delivered,
            dropped: self.dropped_deadline + self.dropped_overflow,
            queued_at_end,
            events: self.events,
            delay_hist: self.delay_hist.clone(),
        }
    }
}

/// Generation slots whose updates count toward timeliness. Falls back to the
/// whole run when it is too short to leave a window after warm-up.
pub fn measurement_window(deadline: u32, horizon: u64, warmup_slots: u64) -> (u64, u64) {
    let end = horizon.saturating_sub(u64::from(deadline));
    if end > warmup_slots {
        (warmup_slots, end)
    } else {
        (0, horizon)
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

/// Summary of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub method: PolicyKind,
    pub k: usize,
    pub m: usize,
    pub p_act: f64,
    pub p_arr: f64,
    pub deadline: u32,
    pub seed: u64,
    pub horizon: u64,
    pub p_timely: f64,
    pub mean_delay: f64,
    pub collision_rate: f64,
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
    pub queued_at_end: u64,
    pub events: u64,
    /// Window deliveries by delay `1..=D`, then late deliveries.
    pub delay_hist: Vec<u64>,
}

impl RunMetrics {
    /// Fields in [`METRICS_HEADER`] order.
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.method.to_string(),
            self.k.to_string(),
            self.m.to_string(),
            self.p_act.to_string(),
            self.p_arr.to_string(),
            self.deadline.to_string(),
            self.seed.to_string(),
            self.horizon.to_string(),
            self.p_timely.to_string(),
            self.mean_delay.to_string(),
            self.collision_rate.to_string(),
        ]
    }

    pub fn csv_row(&self) -> String {
        self.csv_record().join(",")
    }

    /// Every update is delivered, dropped or still queued.
    pub fn is_conserved(&self) -> bool {
        self.generated == self.delivered + self.dropped + self.queued_at_end
    }
}

impl fmt::Display for RunMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: P_timely={:.4} mean_delay={:.3} collision_rate={:.4} ({} updates, {} events)",
            self.method,
            self.p_timely,
            self.mean_delay,
            self.collision_rate,
            self.generated,
            self.events
        )
    }
}

//! Discrete-time network simulation.

use std::io::Write;

use rand::Rng;

use super::cap::{cap_resolve, SlotOutcome};
use super::event_log::{EventKind, EventLog};
use super::lap::{LapEvent, LapState, SlotDraws};
use super::metrics::{MetricsAccumulator, RunMetrics};
use crate::access::AccessConfig;
use crate::agents::PolicyState;
use crate::channel::Environment;
use crate::config::SimConfig;
use crate::error::Result;
use crate::rng::{stream, SimRng, Stream};

/// What went over the air in one slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotReport {
    pub slot: u64,
    pub transmissions: Vec<(usize, AccessConfig)>,
    pub outcome: SlotOutcome,
}

pub type BoxedLog = EventLog<Box<dyn Write + Send>>;

pub struct Engine {
    cfg: SimConfig,
    horizon: u64,
    env: Environment,
    laps: Vec<LapState>,
    activation_rng: SimRng,
    arrivals_rng: SimRng,
    exploration_rng: SimRng,
    replay_rng: SimRng,
    slot: u64,
    metrics: MetricsAccumulator,
    log: Option<BoxedLog>,
    events: Vec<LapEvent>,
}

impl Engine {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        Self::with_horizon(cfg, cfg.horizon)
    }

    pub fn with_horizon(cfg: &SimConfig, horizon: u64) -> Result<Self> {
        cfg.validate()?;
        let env = Environment::new(cfg)?;
        let mut init_rng = stream(cfg.seed, Stream::Init);
        let laps = (0..cfg.k)
            .map(|n| LapState::new(n, cfg.m, cfg.deadline, PolicyState::new(cfg, &mut init_rng)))
            .collect();
        let warmup = (horizon as f64 * cfg.warmup).floor() as u64;
        Ok(Self {
            cfg: cfg.clone(),
            horizon,
            env,
            laps,
            activation_rng: stream(cfg.seed, Stream::Activation),
            arrivals_rng: stream(cfg.seed, Stream::Arrivals),
            exploration_rng: stream(cfg.seed, Stream::Exploration),
            replay_rng: stream(cfg.seed, Stream::Replay),
            slot: 0,
            metrics: MetricsAccumulator::new(cfg.deadline, horizon, warmup),
            log: None,
            events: Vec::new(),
        })
    }

    /// Write every protocol event to `sink` as CSV.
    pub fn set_event_log(&mut self, sink: Box<dyn Write + Send>) -> Result<()> {
        self.log = Some(EventLog::new(sink)?);
        Ok(())
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn slot(&self) -> u64 {
        self.slot
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn laps(&self) -> &[LapState] {
        &self.laps
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    pub fn metrics(&self) -> &MetricsAccumulator {
        &self.metrics
    }

    pub fn is_done(&self) -> bool {
        self.slot >= self.horizon
    }

    /// Advance one slot.
    pub fn step(&mut self) -> Result<SlotReport> {
        let t = self.slot;
        self.env.step();

        // Activation and arrival draws are taken for every LAP in every slot
        // so the streams do not depend on protocol state.
        for n in 0..self.laps.len() {
            let draws = SlotDraws {
                activation: self.activation_rng.random_bool(self.cfg.p_act),
                arrival: self.arrivals_rng.random_bool(self.cfg.p_arr),
            };
            self.events.clear();
            self.laps[n].begin_slot(t, draws, &mut self.replay_rng, &mut self.events);
            self.absorb(t, n)?;
        }

        let mut senders = Vec::new();
        for n in 0..self.laps.len() {
            if self.laps[n].pilot_due(t) {
                let gains = self.env.draw_gains(n);
                senders.push((n, gains.clone()));
                self.events.clear();
                self.laps[n].send_pilot(gains, &mut self.events);
                self.absorb(t, n)?;
            }
        }
        if !senders.is_empty() {
            let signatures = self.env.contention_signature(&senders)?;
            for ((n, _), cs) in senders.iter().zip(signatures) {
                self.laps[*n].receive_cs(cs);
            }
        }

        let mut transmissions = Vec::new();
        for n in 0..self.laps.len() {
            self.events.clear();
            if let Some(cfg) = self.laps[n].transmit(&mut self.exploration_rng, &mut self.events) {
                transmissions.push((n, cfg));
            }
            self.absorb(t, n)?;
        }

        let outcome = cap_resolve(&transmissions, self.cfg.m);
        for (&(n, cfg), &ack) in transmissions.iter().zip(&outcome.success) {
            self.metrics.on_attempt(t, cfg.is_silent(), ack);
            self.events.clear();
            self.laps[n].feedback(t, ack, &mut self.replay_rng, &mut self.events);
            self.absorb(t, n)?;
        }

        self.slot += 1;
        Ok(SlotReport {
            slot: t,
            transmissions,
            outcome,
        })
    }

    fn absorb(&mut self, t: u64, n: usize) -> Result<()> {
        for ev in &self.events {
            let (kind, cfg) = match ev {
                LapEvent::Activate(u) => {
                    self.metrics.on_generated(u);
                    (Some(EventKind::Activate), None)
                }
                LapEvent::Arrival(u) => {
                    self.metrics.on_generated(u);
                    (None, None)
                }
                LapEvent::Pilot => (Some(EventKind::Pilot), None),
                LapEvent::Cs => (Some(EventKind::Cs), None),
                LapEvent::Tx(c) => (Some(EventKind::Tx), Some(*c)),
                LapEvent::Ack(c, u) => {
                    self.metrics.on_delivered(u);
                    (Some(EventKind::Ack), Some(*c))
                }
                LapEvent::DeadlineDrop(_) => {
                    self.metrics.dropped_deadline += 1;
                    (Some(EventKind::DeadlineDrop), None)
                }
                LapEvent::Overflow(u) => {
                    self.metrics.on_generated(u);
                    self.metrics.dropped_overflow += 1;
                    (None, None)
                }
                LapEvent::EventClosed(r) => {
                    self.metrics.on_event_closed(*r);
                    (None, None)
                }
            };
            if let (Some(log), Some(kind)) = (self.log.as_mut(), kind) {
                log.record(t, n, kind, cfg.as_ref())?;
            }
        }
        Ok(())
    }

    /// Run to the horizon and summarize.
    pub fn run(mut self) -> Result<RunMetrics> {
        while !self.is_done() {
            self.step()?;
        }
        self.finish()
    }

    pub fn finish(mut self) -> Result<RunMetrics> {
        if let Some(log) = self.log.as_mut() {
            log.flush()?;
        }
        let queued = self.laps.iter().map(|l| l.queue.len() as u64).sum();
        Ok(self.metrics.summary(&self.cfg, self.slot, queued))
    }
}

/// Simulate `cfg` for `horizon` slots.
pub fn engine_run(cfg: &SimConfig, horizon: u64) -> Result<RunMetrics> {
    Engine::with_horizon(cfg, horizon)?.run()
}

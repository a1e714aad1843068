//! LAP transmission state machine.
//!
//! An alarm event serves one head-of-line update: pilot in the opening slot,
//! contention signature in the next, then transmissions from the slot after
//! that until an ACK arrives or the update's deadline passes. A LAP with a
//! non-empty queue after an event opens the next event in the following slot;
//! with an empty queue it returns to normal mode.

use std::collections::VecDeque;

use rand::Rng;

use crate::access::AccessConfig;
use crate::agents::{reward_for, PolicyState};
use crate::channel::{ComplexGainVector, CsSignal};
use crate::config::QUEUE_CAP;
use crate::update::Update;

/// Slots until a missing ACK triggers a retransmission.
pub const T_ACK: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Normal,
    Alarm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Pilot,
    AwaitCs,
    Transmit,
}

#[derive(Debug, Clone)]
struct AlarmEvent {
    phase: Phase,
    opened: u64,
    gains: Option<ComplexGainVector>,
    pending_cs: Option<CsSignal>,
    features: Vec<f64>,
    attempts: u32,
}

/// Something a LAP did that the engine logs or counts.
#[derive(Debug, Clone, PartialEq)]
pub enum LapEvent {
    Activate(Update),
    /// Update accepted into an alarm-mode queue.
    Arrival(Update),
    Pilot,
    Cs,
    Tx(AccessConfig),
    Ack(AccessConfig, Update),
    /// Head-of-line update dropped at its deadline.
    DeadlineDrop(Update),
    /// Arrival rejected by a full queue.
    Overflow(Update),
    /// An event the policy acted in has closed with this reward.
    EventClosed(i8),
}

/// Draws that drive a LAP through one slot.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SlotDraws {
    pub activation: bool,
    pub arrival: bool,
}

#[derive(Debug, Clone)]
pub struct LapState {
    pub id: usize,
    pub mode: Mode,
    pub queue: VecDeque<Update>,
    /// Slots left, including the current one, to deliver the HoL update.
    pub timer_d: u32,
    pub timer_ack: u32,
    pub chosen_config: AccessConfig,
    pub policy: PolicyState,
    pub cached_cs: Option<CsSignal>,
    deadline: u32,
    channels: usize,
    event: Option<AlarmEvent>,
}

impl LapState {
    pub fn new(id: usize, channels: usize, deadline: u32, policy: PolicyState) -> Self {
        Self {
            id,
            mode: Mode::Normal,
            queue: VecDeque::new(),
            timer_d: 0,
            timer_ack: 0,
            chosen_config: AccessConfig::silent(channels),
            policy,
            cached_cs: None,
            deadline,
            channels,
            event: None,
        }
    }

    pub fn phase(&self) -> Option<Phase> {
        self.event.as_ref().map(|e| e.phase)
    }

    fn open_event(&mut self, slot: u64) {
        self.event = Some(AlarmEvent {
            phase: Phase::Pilot,
            opened: slot,
            gains: None,
            pending_cs: None,
            features: Vec::new(),
            attempts: 0,
        });
        self.cached_cs = None;
    }

    fn close_event<R: Rng + ?Sized>(
        &mut self,
        reward: i8,
        next_open: u64,
        replay_rng: &mut R,
        out: &mut Vec<LapEvent>,
    ) {
        let attempted = self.event.take().is_some_and(|e| e.attempts > 0);
        if attempted {
            self.policy.end_event(replay_rng);
            out.push(LapEvent::EventClosed(reward));
        }
        self.chosen_config = AccessConfig::silent(self.channels);
        self.timer_ack = 0;
        if self.queue.is_empty() {
            self.mode = Mode::Normal;
            self.timer_d = 0;
            self.cached_cs = None;
        } else {
            self.open_event(next_open);
        }
    }

    fn refresh_timer(&mut self, slot: u64) {
        self.timer_d = self.queue.front().map_or(0, |u| {
            (u.last_useful_slot(self.deadline) + 1).saturating_sub(slot) as u32
        });
    }

    /// Start of slot: activation, arrivals, deadline expiry and CS reception.
    pub fn begin_slot<R: Rng + ?Sized>(
        &mut self,
        slot: u64,
        draws: SlotDraws,
        replay_rng: &mut R,
        out: &mut Vec<LapEvent>,
    ) {
        if self.mode == Mode::Normal && draws.activation {
            self.mode = Mode::Alarm;
            let u = Update::new(slot);
            self.queue.push_back(u);
            self.open_event(slot);
            out.push(LapEvent::Activate(u));
        } else if self.mode == Mode::Alarm && draws.arrival {
            let u = Update::new(slot);
            if self.queue.len() < QUEUE_CAP {
                self.queue.push_back(u);
                out.push(LapEvent::Arrival(u));
            } else {
                log::debug!(
                    "LAP {} queue full, dropping update from slot {slot}",
                    self.id
                );
                out.push(LapEvent::Overflow(u));
            }
        }

        // Stale head-of-line updates are dropped and end their event.
        while let Some(head) = self.queue.front().copied() {
            if slot <= head.last_useful_slot(self.deadline) {
                break;
            }
            self.queue.pop_front();
            out.push(LapEvent::DeadlineDrop(head));
            self.close_event(reward_for(false), slot, replay_rng, out);
        }
        self.refresh_timer(slot);

        // The signature arrives the slot after the pilot; transmission
        // starts the slot after that.
        if let Some(ev) = &mut self.event {
            if ev.phase == Phase::AwaitCs && slot > ev.opened {
                if let Some(cs) = ev.pending_cs.take() {
                    ev.features = cs.features();
                    self.cached_cs = Some(cs);
                    out.push(LapEvent::Cs);
                }
                if slot > ev.opened + 1 {
                    ev.phase = Phase::Transmit;
                }
            }
        }
    }

    /// Whether this LAP sends its pilot in `slot`.
    pub fn pilot_due(&self, slot: u64) -> bool {
        self.event
            .as_ref()
            .is_some_and(|e| e.phase == Phase::Pilot && e.opened == slot)
    }

    /// Register the block-fading gains used for this event's pilot.
    pub fn send_pilot(&mut self, gains: ComplexGainVector, out: &mut Vec<LapEvent>) {
        let ev = self.event.as_mut().expect("pilot needs an open event");
        ev.gains = Some(gains);
        out.push(LapEvent::Pilot);
    }

    pub fn pilot_gains(&self) -> Option<&ComplexGainVector> {
        self.event.as_ref().and_then(|e| e.gains.as_ref())
    }

    /// The CAP's broadcast as observed by this LAP; usable from the next slot.
    pub fn receive_cs(&mut self, cs: CsSignal) {
        let ev = self.event.as_mut().expect("signature needs an open event");
        ev.pending_cs = Some(cs);
        ev.phase = Phase::AwaitCs;
    }

    /// Pick a configuration and transmit, if the event is in its
    /// transmission phase and no ACK is outstanding.
    pub fn transmit<R: Rng + ?Sized>(
        &mut self,
        explore_rng: &mut R,
        out: &mut Vec<LapEvent>,
    ) -> Option<AccessConfig> {
        let ev = self.event.as_mut()?;
        if ev.phase != Phase::Transmit || self.timer_ack > 0 {
            return None;
        }
        let cfg = self.policy.select(&ev.features, self.channels, explore_rng);
        ev.attempts += 1;
        self.chosen_config = cfg;
        self.timer_ack = T_ACK;
        out.push(LapEvent::Tx(cfg));
        Some(cfg)
    }

    /// End of a transmission slot: ACK or its absence.
    pub fn feedback<R: Rng + ?Sized>(
        &mut self,
        slot: u64,
        ack: bool,
        replay_rng: &mut R,
        out: &mut Vec<LapEvent>,
    ) {
        let Some(ev) = &self.event else { return };
        let cfg = self.chosen_config;
        self.policy.observe(&ev.features, cfg, reward_for(ack));
        if ack {
            let mut u = self
                .queue
                .pop_front()
                .expect("transmitting LAP has a HoL update");
            u.deliver(slot + 1);
            out.push(LapEvent::Ack(cfg, u));
            self.close_event(reward_for(true), slot + 1, replay_rng, out);
        } else {
            self.timer_ack = self.timer_ack.saturating_sub(1);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    fn lap(deadline: u32) -> LapState {
        LapState::new(0, 2, deadline, PolicyState::Fixed(1))
    }

    const ACT: SlotDraws = SlotDraws {
        activation: true,
        arrival: false,
    };
    const IDLE: SlotDraws = SlotDraws {
        activation: false,
        arrival: false,
    };

    /// Drive a LAP through activation, pilot and CS; returns the first
    /// transmission slot.
    fn activate(l: &mut LapState, slot: u64, out: &mut Vec<LapEvent>) -> u64 {
        let mut rng = stream(0, Stream::Replay);
        l.begin_slot(slot, ACT, &mut rng, out);
        assert!(l.pilot_due(slot));
        l.send_pilot(ComplexGainVector(vec![Default::default(); 2]), out);
        l.receive_cs(CsSignal::zeros(2));
        l.begin_slot(slot + 1, IDLE, &mut rng, out);
        assert_eq!(l.phase(), Some(Phase::AwaitCs));
        assert!(l.transmit(&mut rng, out).is_none());
        slot + 2
    }

    #[test]
    fn normal_without_activation_stays_quiet() {
        let mut l = lap(20);
        let mut out = vec![];
        let mut rng = stream(0, Stream::Replay);
        l.begin_slot(0, IDLE, &mut rng, &mut out);
        assert_eq!(l.mode, Mode::Normal);
        assert!(l.chosen_config.is_silent());
        assert!(l.transmit(&mut rng, &mut out).is_none());
        assert!(out.is_empty());
    }

    #[test]
    fn ack_closes_event_with_positive_reward() {
        let mut l = lap(20);
        let mut out = vec![];
        let mut rng = stream(0, Stream::Replay);
        let t = activate(&mut l, 10, &mut out);
        l.begin_slot(t, IDLE, &mut rng, &mut out);
        assert_eq!(l.timer_d, 18);
        // fail a few times first
        for s in t..t + 3 {
            if s > t {
                l.begin_slot(s, IDLE, &mut rng, &mut out);
            }
            assert!(l.transmit(&mut rng, &mut out).is_some());
            l.feedback(s, false, &mut rng, &mut out);
        }
        l.begin_slot(t + 3, IDLE, &mut rng, &mut out);
        assert_eq!(l.timer_d, 5 + 10);
        l.transmit(&mut rng, &mut out).unwrap();
        l.feedback(t + 3, true, &mut rng, &mut out);
        assert!(out.contains(&LapEvent::EventClosed(1)));
        let delivered = out.iter().find_map(|e| match e {
            LapEvent::Ack(_, u) => Some(*u),
            _ => None,
        });
        assert_eq!(delivered.unwrap().delay(), Some(6));
        assert_eq!(l.mode, Mode::Normal);
        assert!(l.chosen_config.is_silent());
    }

    #[test]
    fn ack_with_five_slots_left_rewards_plus_one() {
        let mut l = lap(20);
        let mut out = vec![];
        let mut rng = stream(0, Stream::Replay);
        let t = activate(&mut l, 0, &mut out);
        let mut s = t;
        loop {
            l.begin_slot(s, IDLE, &mut rng, &mut out);
            l.transmit(&mut rng, &mut out).unwrap();
            if l.timer_d == 5 {
                l.feedback(s, true, &mut rng, &mut out);
                break;
            }
            l.feedback(s, false, &mut rng, &mut out);
            s += 1;
        }
        assert_eq!(out.last(), Some(&LapEvent::EventClosed(1)));
    }

    #[test]
    fn deadline_expiry_rewards_minus_one() {
        let mut l = lap(5);
        let mut out = vec![];
        let mut rng = stream(0, Stream::Replay);
        let t = activate(&mut l, 0, &mut out);
        for s in t..5 {
            l.begin_slot(s, IDLE, &mut rng, &mut out);
            assert!(l.timer_d >= 1 && l.timer_d <= 5);
            l.transmit(&mut rng, &mut out).unwrap();
            l.feedback(s, false, &mut rng, &mut out);
        }
        l.begin_slot(5, IDLE, &mut rng, &mut out);
        assert!(matches!(out[out.len() - 2], LapEvent::DeadlineDrop(u) if u.generation_slot == 0));
        assert_eq!(out.last(), Some(&LapEvent::EventClosed(-1)));
        assert_eq!(l.mode, Mode::Normal);
        assert_eq!(l.timer_d, 0);
    }

    #[test]
    fn queued_update_opens_next_event() {
        let mut l = lap(20);
        let mut out = vec![];
        let mut rng = stream(0, Stream::Replay);
        let t = activate(&mut l, 0, &mut out);
        l.begin_slot(
            t,
            SlotDraws {
                activation: false,
                arrival: true,
            },
            &mut rng,
            &mut out,
        );
        assert_eq!(l.queue.len(), 2);
        l.transmit(&mut rng, &mut out).unwrap();
        l.feedback(t, true, &mut rng, &mut out);
        assert_eq!(l.mode, Mode::Alarm);
        assert!(l.pilot_due(t + 1));
        assert!(!l.pilot_due(t));
    }

    #[test]
    fn activation_ignored_while_in_alarm() {
        let mut l = lap(20);
        let mut out = vec![];
        let t = activate(&mut l, 0, &mut out);
        let mut rng = stream(0, Stream::Replay);
        l.begin_slot(t, ACT, &mut rng, &mut out);
        assert_eq!(l.queue.len(), 1);
        assert_eq!(
            out.iter()
                .filter(|e| matches!(e, LapEvent::Activate(_)))
                .count(),
            1
        );
    }

    #[test]
    fn full_queue_overflows_newest() {
        let mut l = lap(1000);
        let mut out = vec![];
        let mut rng = stream(0, Stream::Replay);
        activate(&mut l, 0, &mut out);
        let arrive = SlotDraws {
            activation: false,
            arrival: true,
        };
        for s in 2..2 + QUEUE_CAP as u64 {
            l.begin_slot(s, arrive, &mut rng, &mut out);
        }
        assert_eq!(l.queue.len(), QUEUE_CAP);
        assert!(matches!(out.last(), Some(LapEvent::Overflow(u)) if u.generation_slot == 101));
    }
}

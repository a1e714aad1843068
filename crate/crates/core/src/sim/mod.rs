//! Slotted network simulation: the collision channel at the CAP, per-LAP
//! alarm state machines, the engine loop and its metrics.

mod cap;
mod engine;
mod event_log;
mod lap;
mod metrics;
mod single_queue;
mod slots;

pub use cap::{cap_resolve, SlotOutcome};
pub use engine::{engine_run, Engine, SlotReport};
pub use event_log::{channel_list, EventKind, EventLog, EVENT_LOG_HEADER};
pub use lap::{LapEvent, LapState, Mode, Phase, SlotDraws, T_ACK};
pub use metrics::{measurement_window, MetricsAccumulator, RunMetrics, METRICS_HEADER};
pub use single_queue::{simulate_single_queue, SingleQueueStats};
pub use slots::{sample_collision_slots, CollisionSample};

//! Deadline-constrained random access for industrial subnetworks.
//!
//! LAPs contend for `M` shared uplink channels to a central access point
//! whenever an alarm fires. Each LAP picks an access configuration (a subset
//! of channels) per attempt; the CAP acknowledges a LAP that is alone on at
//! least one of its channels. The crate provides:
//!
//! - [`channel`]: propagation, block fading, mobility and the contention
//!   signature broadcast that LAPs use as context;
//! - [`neural`] and [`agents`]: the signature-driven neural agent and the
//!   bandit and random-hopping baselines;
//! - [`sim`]: the slotted engine, the collision channel and run metrics;
//! - [`analytics`]: closed-form success probability, queueing and
//!   deadline-violation formulas and an exhaustive optimizer;
//! - [`experiment`]: replicated parameter sweeps with CSV output.

pub mod access;
pub mod agents;
pub mod analytics;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod neural;
pub mod rng;
pub mod sim;
pub mod update;

pub use access::{action_count, config_index_to_mask, mask_to_config_index, AccessConfig};
pub use analytics::PsiMatrix;
pub use config::{PolicyKind, SimConfig};
pub use error::{Error, Result};
pub use sim::{engine_run, Engine, RunMetrics};
pub use update::Update;

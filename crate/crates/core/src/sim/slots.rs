//! Memoryless slot sampler: each slot every LAP is active with probability
//! `p_act` and, when active, draws its configuration from its row of `Ψ`.

use rand::Rng;

use super::cap::cap_resolve;
use crate::analytics::PsiMatrix;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CollisionSample {
    pub slots: u64,
    /// Slots in which some channel carried exactly one transmitter.
    pub successful_slots: u64,
    /// Transmissions on at least one channel.
    pub attempts: u64,
    pub acknowledged: u64,
}

impl CollisionSample {
    pub fn success_frequency(&self) -> f64 {
        self.successful_slots as f64 / self.slots as f64
    }

    pub fn ack_rate(&self) -> f64 {
        self.acknowledged as f64 / self.attempts as f64
    }

    /// Standard error of [`CollisionSample::success_frequency`].
    pub fn std_error(&self) -> f64 {
        let p = self.success_frequency();
        (p * (1.0 - p) / self.slots as f64).sqrt()
    }
}

pub fn sample_collision_slots<A, C>(
    psi: &PsiMatrix,
    p_act: f64,
    slots: u64,
    activation_rng: &mut A,
    config_rng: &mut C,
) -> CollisionSample
where
    A: Rng + ?Sized,
    C: Rng + ?Sized,
{
    let mut out = CollisionSample {
        slots,
        ..Default::default()
    };
    let mut tx = Vec::with_capacity(psi.laps());
    for _ in 0..slots {
        tx.clear();
        for n in 0..psi.laps() {
            if activation_rng.random_bool(p_act) {
                tx.push((n, psi.sample(n, config_rng)));
            }
        }
        let outcome = cap_resolve(&tx, psi.channels());
        if outcome.any_success() {
            out.successful_slots += 1;
        }
        for ((_, cfg), ok) in tx.iter().zip(&outcome.success) {
            if !cfg.is_silent() {
                out.attempts += 1;
                out.acknowledged += u64::from(*ok);
            }
        }
    }
    out
}

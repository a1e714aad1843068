use rand::Rng;

use crate::access::AccessConfig;

/// Random channel hopping: one channel, uniformly chosen.
pub fn select_action_rch<R: Rng + ?Sized>(channels: usize, rng: &mut R) -> AccessConfig {
    let m = rng.random_range(0..channels);
    AccessConfig::single(m, channels).expect("channel in range")
}

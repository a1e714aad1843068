use crate::access::AccessConfig;

/// Result of resolving one slot on the collision channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlotOutcome {
    /// Parallel to the transmissions passed to [`cap_resolve`].
    pub success: Vec<bool>,
    /// Number of transmitters on each channel.
    pub channel_counts: Vec<u32>,
}

impl SlotOutcome {
    /// Some channel carried exactly one transmitter (network-level success).
    pub fn any_success(&self) -> bool {
        self.channel_counts.contains(&1)
    }

    pub fn successes(&self) -> usize {
        self.success.iter().filter(|&&s| s).count()
    }
}

/// Collision channel: a LAP is acknowledged iff at least one of its channels
/// carries no other transmitter.
pub fn cap_resolve(transmissions: &[(usize, AccessConfig)], channels: usize) -> SlotOutcome {
    let mut counts = vec![0u32; channels];
    for (_, cfg) in transmissions {
        for m in cfg.active_channels() {
            counts[m] += 1;
        }
    }
    let success = transmissions
        .iter()
        .map(|(_, cfg)| cfg.active_channels().any(|m| counts[m] == 1))
        .collect();
    SlotOutcome {
        success,
        channel_counts: counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(mask: &[u8]) -> AccessConfig {
        AccessConfig::from_mask(&mask.iter().map(|&b| b == 1).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn orthogonal_channels_both_succeed() {
        let o = cap_resolve(&[(1, cfg(&[1, 0])), (2, cfg(&[0, 1]))], 2);
        assert_eq!(o.success, vec![true, true]);
    }

    #[test]
    fn same_channel_collides() {
        let o = cap_resolve(&[(1, cfg(&[1, 0])), (2, cfg(&[1, 0]))], 2);
        assert_eq!(o.success, vec![false, false]);
        assert!(!o.any_success());
    }

    #[test]
    fn partial_overlap() {
        let o = cap_resolve(&[(1, cfg(&[1, 1])), (2, cfg(&[1, 0]))], 2);
        assert_eq!(o.success, vec![true, false]);
        assert_eq!(o.channel_counts, vec![2, 1]);
    }

    #[test]
    fn exhaustive_two_lap_two_channel_check() {
        // Per-channel recount against the resolver for all 16 joint configs.
        for a in 0..4 {
            for b in 0..4 {
                let (ca, cb) = (
                    AccessConfig::from_index(a, 2).unwrap(),
                    AccessConfig::from_index(b, 2).unwrap(),
                );
                let o = cap_resolve(&[(0, ca), (1, cb)], 2);
                let alone = |me: AccessConfig, other: AccessConfig| {
                    (0..2).any(|m| me.uses(m) && !other.uses(m))
                };
                assert_eq!(o.success, vec![alone(ca, cb), alone(cb, ca)]);
                let delta = (0..2).any(|m| u8::from(ca.uses(m)) + u8::from(cb.uses(m)) == 1);
                assert_eq!(o.any_success(), delta);
            }
        }
    }

    #[test]
    fn silent_config_never_succeeds() {
        let o = cap_resolve(&[(0, AccessConfig::silent(3))], 3);
        assert_eq!(o.success, vec![false]);
    }
}

//! Access configurations: which of the `M` channels a LAP transmits on.
//!
//! Configuration `i` in `0..2^M` maps to the mask whose entry `m` is bit `m`
//! of `i`, so channel 1 is the least-significant bit and index 0 is the
//! "transmit nowhere" configuration.

use std::fmt;

use crate::error::{Error, Result};

/// Largest channel count supported by the index encoding.
pub const MAX_CHANNELS: usize = 16;

/// Binary channel-selection mask of length `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AccessConfig {
    bits: u32,
    channels: u8,
}

impl AccessConfig {
    /// The all-zero configuration for `channels` channels.
    pub fn silent(channels: usize) -> Self {
        Self {
            bits: 0,
            channels: channels as u8,
        }
    }

    pub fn from_index(index: usize, channels: usize) -> Result<Self> {
        let limit = action_count(channels);
        if channels == 0 || channels > MAX_CHANNELS || index >= limit {
            return Err(Error::IndexOutOfRange {
                index,
                channels,
                limit,
            });
        }
        Ok(Self {
            bits: index as u32,
            channels: channels as u8,
        })
    }

    pub fn from_mask(mask: &[bool]) -> Result<Self> {
        if mask.is_empty() || mask.len() > MAX_CHANNELS {
            return Err(Error::DimensionMismatch {
                expected: MAX_CHANNELS,
                actual: mask.len(),
            });
        }
        let bits = mask
            .iter()
            .enumerate()
            .fold(0u32, |acc, (m, &on)| acc | (u32::from(on) << m));
        Ok(Self {
            bits,
            channels: mask.len() as u8,
        })
    }

    /// Configuration that transmits on exactly one channel (0-based).
    pub fn single(channel: usize, channels: usize) -> Result<Self> {
        if channel >= channels {
            return Err(Error::IndexOutOfRange {
                index: channel,
                channels,
                limit: channels,
            });
        }
        Self::from_index(1 << channel, channels)
    }

    pub fn index(&self) -> usize {
        self.bits as usize
    }

    pub fn channels(&self) -> usize {
        self.channels as usize
    }

    /// Whether the LAP transmits on channel `m` (0-based).
    pub fn uses(&self, m: usize) -> bool {
        m < self.channels() && self.bits & (1 << m) != 0
    }

    pub fn mask(&self) -> Vec<bool> {
        (0..self.channels()).map(|m| self.uses(m)).collect()
    }

    pub fn count_ones(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_silent(&self) -> bool {
        self.bits == 0
    }

    /// 0-based channel indices in use, ascending.
    pub fn active_channels(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.channels()).filter(move |&m| self.uses(m))
    }
}

impl fmt::Display for AccessConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for m in 0..self.channels() {
            if m > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", u8::from(self.uses(m)))?;
        }
        f.write_str("]")
    }
}

/// Number of access configurations, `2^M`.
pub fn action_count(channels: usize) -> usize {
    1usize << channels.min(usize::BITS as usize - 1)
}

/// Mask for configuration `index` with `channels` channels.
pub fn config_index_to_mask(index: usize, channels: usize) -> Result<Vec<bool>> {
    AccessConfig::from_index(index, channels).map(|c| c.mask())
}

pub fn mask_to_config_index(mask: &[bool]) -> Result<usize> {
    AccessConfig::from_mask(mask).map(|c| c.index())
}

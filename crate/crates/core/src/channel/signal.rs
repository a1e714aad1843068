//! Pilot aggregation at the CAP and the contention-signature broadcast.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Per-channel complex coefficients between one LAP and the CAP.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGainVector(pub Vec<Complex64>);

/// An `M`-sample complex signal: the CAP aggregate or a LAP's observation of
/// the broadcast.
#[derive(Debug, Clone, PartialEq)]
pub struct CsSignal(pub Vec<Complex64>);

impl CsSignal {
    pub fn zeros(m: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Real parts followed by imaginary parts: `2M` reals.
    pub fn features(&self) -> Vec<f64> {
        self.0
            .iter()
            .map(|c| c.re)
            .chain(self.0.iter().map(|c| c.im))
            .collect()
    }
}

/// Unit pilot: one unit symbol per channel.
pub fn unit_pilot(m: usize) -> Vec<Complex64> {
    vec![Complex64::new(1.0, 0.0); m]
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// `y = Σ_{n ∈ active} √η · diag(h_n) · x_n + σ`.
pub fn aggregate_pilot(
    active: &[usize],
    gains: &[ComplexGainVector],
    pilots: &[Vec<Complex64>],
    snr_linear: f64,
    noise: &[Complex64],
) -> Result<CsSignal> {
    let m = noise.len();
    let amp = snr_linear.sqrt();
    let mut y = noise.to_vec();
    for &n in active {
        let h = gains.get(n).ok_or(Error::DimensionMismatch {
            expected: n + 1,
            actual: gains.len(),
        })?;
        let x = pilots.get(n).ok_or(Error::DimensionMismatch {
            expected: n + 1,
            actual: pilots.len(),
        })?;
        check_len(m, h.0.len())?;
        check_len(m, x.len())?;
        for ((acc, h), x) in y.iter_mut().zip(&h.0).zip(x) {
            *acc += amp * h * x;
        }
    }
    Ok(CsSignal(y))
}

/// `y_n = √η · diag(h_n) · y + σ'`.
pub fn broadcast_cs(
    y: &CsSignal,
    gain: &ComplexGainVector,
    snr_linear: f64,
    noise: &[Complex64],
) -> Result<CsSignal> {
    check_len(y.len(), gain.0.len())?;
    check_len(y.len(), noise.len())?;
    let amp = snr_linear.sqrt();
    Ok(CsSignal(
        y.0.iter()
            .zip(&gain.0)
            .zip(noise)
            .map(|((y, h), s)| amp * h * y + s)
            .collect(),
    ))
}

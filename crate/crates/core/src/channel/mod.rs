//! Radio environment: propagation, contention-signature generation and
//! subnetwork mobility.

mod mobility;
mod pathloss;
mod shadowing;
mod signal;

pub use mobility::{distance, mobility_step, place_snapshot, MobilityReport, Pose};
pub use pathloss::{channel_gain, pathloss_db};
pub use shadowing::{shadowing_at, ShadowingField, ShadowingGrid};
pub use signal::{aggregate_pilot, broadcast_cs, unit_pilot, ComplexGainVector, CsSignal};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::{Area, Propagation, SimConfig};
use crate::error::Result;
use crate::rng::{stream, SimRng, Stream};

/// Links shorter than this use the reference distance.
const MIN_LINK_M: f64 = 1.0;

/// Circularly-symmetric `CN(0, 1)` draw.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn complex_noise<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<Complex64> {
    (0..m).map(|_| complex_normal(rng)).collect()
}

/// The physical world of one simulation run. The CAP sits at the center of
/// the deployment area.
#[derive(Debug, Clone)]
pub struct Environment {
    channels: usize,
    area: Area,
    propagation: Propagation,
    snr_linear: f64,
    min_sep: f64,
    dt: f64,
    cap: (f64, f64),
    poses: Vec<Pose>,
    field: ShadowingField,
    mobility_rng: SimRng,
    fading_rng: SimRng,
    noise_rng: SimRng,
}

impl Environment {
    pub fn new(cfg: &SimConfig) -> Result<Self> {
        let poses = place_snapshot(
            cfg.k,
            cfg.area,
            cfg.min_sep,
            cfg.speed,
            &mut stream(cfg.seed, Stream::Placement),
        )?;
        let p = cfg.propagation;
        let grid = ShadowingGrid::new(cfg.area, p.sigma_s, p.d_corr, 1.0)?;
        let field = grid.sample(&mut stream(cfg.seed, Stream::Shadowing));
        Ok(Self {
            channels: cfg.m,
            area: cfg.area,
            propagation: p,
            snr_linear: cfg.snr_linear(),
            min_sep: cfg.min_sep,
            dt: cfg.slot_seconds(),
            cap: cfg.area.center(),
            poses,
            field,
            mobility_rng: stream(cfg.seed, Stream::Mobility),
            fading_rng: stream(cfg.seed, Stream::Fading),
            noise_rng: stream(cfg.seed, Stream::Noise),
        })
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn cap_position(&self) -> (f64, f64) {
        self.cap
    }

    /// Move every subnetwork by one slot.
    pub fn step(&mut self) -> MobilityReport {
        mobility_step(
            &mut self.poses,
            self.dt,
            self.area,
            self.min_sep,
            &mut self.mobility_rng,
        )
    }

    /// Pathloss plus shadowing, in dB, from LAP `lap` to the CAP.
    pub fn link_loss_db(&self, lap: usize) -> f64 {
        let pos = self.poses[lap].position();
        let d = distance(pos, self.cap).max(MIN_LINK_M);
        let p = &self.propagation;
        let pl = pathloss_db(d, p.fc_ghz, p.alpha, p.beta, p.gamma)
            .expect("distance and carrier are positive");
        pl + self.field.link(pos, self.cap)
    }

    /// Fresh block-fading coefficients for LAP `lap` at its current position.
    pub fn draw_gains(&mut self, lap: usize) -> ComplexGainVector {
        let loss = self.link_loss_db(lap);
        ComplexGainVector(
            (0..self.channels)
                .map(|_| channel_gain(loss, 0.0, complex_normal(&mut self.fading_rng)))
                .collect(),
        )
    }

    /// Run one pilot/broadcast exchange for the LAPs that sent pilots this
    /// slot and return each sender's observed contention signature.
    pub fn contention_signature(
        &mut self,
        senders: &[(usize, ComplexGainVector)],
    ) -> Result<Vec<CsSignal>> {
        let m = self.channels;
        let gains: Vec<ComplexGainVector> = senders.iter().map(|(_, g)| g.clone()).collect();
        let pilots = vec![unit_pilot(m); senders.len()];
        let active: Vec<usize> = (0..senders.len()).collect();
        let noise = complex_noise(m, &mut self.noise_rng);
        let y = aggregate_pilot(&active, &gains, &pilots, self.snr_linear, &noise)?;
        gains
            .iter()
            .map(|g| {
                let noise = complex_noise(m, &mut self.noise_rng);
                broadcast_cs(&y, g, self.snr_linear, &noise)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cs_generation_is_deterministic() {
        let cfg = SimConfig {
            k: 5,
            ..SimConfig::default()
        };
        let run = || {
            let mut env = Environment::new(&cfg).unwrap();
            let mut out = Vec::new();
            for _ in 0..20 {
                env.step();
                let senders: Vec<_> = (0..3).map(|n| (n, env.draw_gains(n))).collect();
                out.extend(env.contention_signature(&senders).unwrap());
            }
            out
        };
        let a = run();
        let b = run();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            for (p, q) in x.0.iter().zip(&y.0) {
                assert_eq!(p.re.to_bits(), q.re.to_bits());
                assert_eq!(p.im.to_bits(), q.im.to_bits());
            }
        }
    }

    #[test]
    fn signature_magnitude_grows_with_contention() {
        // High SNR, unit pilots: E|y[m]| increases with the number of senders.
        let mut rng = stream(17, Stream::Fading);
        let eta = 1e8;
        let draws = 10_000;
        let means: Vec<f64> = (1..=5)
            .map(|active| {
                let mut total = 0.0;
                for _ in 0..draws {
                    let gains: Vec<_> = (0..active)
                        .map(|_| ComplexGainVector(vec![complex_normal(&mut rng)]))
                        .collect();
                    let pilots = vec![unit_pilot(1); active];
                    let ids: Vec<usize> = (0..active).collect();
                    let noise = complex_noise(1, &mut rng);
                    let y = aggregate_pilot(&ids, &gains, &pilots, eta, &noise).unwrap();
                    total += y.0[0].norm();
                }
                total / draws as f64
            })
            .collect();
        for w in means.windows(2) {
            assert!(w[1] > w[0], "{means:?}");
        }
    }

    #[test]
    fn link_loss_is_finite_everywhere() {
        let env = Environment::new(&SimConfig {
            k: 30,
            ..SimConfig::default()
        })
        .unwrap();
        for n in 0..30 {
            let l = env.link_loss_db(n);
            assert!(l.is_finite() && l > 0.0);
        }
    }
}

//! Snapshot placement and constant-speed random-direction mobility.

use std::f64::consts::TAU;

use rand::Rng;

use crate::config::Area;
use crate::error::{Error, Result};

const PLACEMENT_TRIES: usize = 10_000;
const PLACEMENT_RESTARTS: usize = 100;
const DIRECTION_RETRIES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Heading in radians.
    pub direction: f64,
    /// Speed in m/s.
    pub speed: f64,
}

impl Pose {
    pub fn position(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    pub fn distance_to(&self, other: &Pose) -> f64 {
        distance(self.position(), other.position())
    }

    fn advanced(&self, dt: f64) -> (f64, f64) {
        let step = self.speed * dt;
        (
            self.x + step * self.direction.cos(),
            self.y + step * self.direction.sin(),
        )
    }
}

pub fn distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

/// Uniform placement with rejection sampling on the minimum separation.
pub fn place_snapshot<R: Rng + ?Sized>(
    k: usize,
    area: Area,
    min_sep: f64,
    speed: f64,
    rng: &mut R,
) -> Result<Vec<Pose>> {
    'restart: for _ in 0..PLACEMENT_RESTARTS {
        let mut poses: Vec<Pose> = Vec::with_capacity(k);
        while poses.len() < k {
            let mut placed = false;
            for _ in 0..PLACEMENT_TRIES {
                let p = (
                    rng.random::<f64>() * area.width,
                    rng.random::<f64>() * area.height,
                );
                if poses.iter().all(|q| distance(p, q.position()) >= min_sep) {
                    poses.push(Pose {
                        x: p.0,
                        y: p.1,
                        direction: rng.random::<f64>() * TAU,
                        speed,
                    });
                    placed = true;
                    break;
                }
            }
            if !placed {
                continue 'restart;
            }
        }
        return Ok(poses);
    }
    Err(Error::Placement(format!(
        "could not place {k} subnetworks {min_sep} m apart in a {area} m area"
    )))
}

/// What happened during one mobility step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MobilityReport {
    pub resampled: usize,
    pub stalled: usize,
}

/// Advance every pose by `speed · dt` along its heading.
///
/// A step is rejected if it leaves the area or moves a unit closer to another
/// unit that would then be nearer than `min_sep`; the heading is then redrawn
/// until a valid step exists. After bounded retries the unit holds position
/// for this step. Units are moved in order against already-moved neighbors.
pub fn mobility_step<R: Rng + ?Sized>(
    poses: &mut [Pose],
    dt: f64,
    area: Area,
    min_sep: f64,
    rng: &mut R,
) -> MobilityReport {
    let mut report = MobilityReport::default();
    for i in 0..poses.len() {
        if poses[i].speed * dt == 0.0 {
            continue;
        }
        let mut retries = 0;
        loop {
            let next = poses[i].advanced(dt);
            let inside = area.contains(next.0, next.1);
            let clear = poses.iter().enumerate().all(|(j, other)| {
                if i == j {
                    return true;
                }
                let now = distance(poses[i].position(), other.position());
                let after = distance(next, other.position());
                after >= min_sep || after >= now
            });
            if inside && clear {
                poses[i].x = next.0;
                poses[i].y = next.1;
                break;
            }
            if retries == DIRECTION_RETRIES {
                report.stalled += 1;
                log::debug!(
                    "subnetwork {i} stalled at ({:.3}, {:.3})",
                    poses[i].x,
                    poses[i].y
                );
                break;
            }
            poses[i].direction = rng.random::<f64>() * TAU;
            report.resampled += 1;
            retries += 1;
        }
    }
    report
}

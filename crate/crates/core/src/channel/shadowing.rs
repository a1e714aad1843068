//! Spatially correlated log-normal shadowing.
//!
//! A zero-mean Gaussian field with covariance `σ² · exp(-d / d_corr)` is drawn
//! on a regular grid (Cholesky factor of the grid covariance) and read off at
//! arbitrary points by bilinear interpolation. A link between two endpoints
//! combines the field at both ends so that short links see little shadowing.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::Area;
use crate::error::{Error, Result};

/// Upper bound on grid nodes; the spacing grows to respect it.
const MAX_NODES: usize = 1600;

/// Precomputed grid geometry and covariance factor for one area.
#[derive(Debug, Clone)]
pub struct ShadowingGrid {
    nx: usize,
    ny: usize,
    spacing: f64,
    sigma: f64,
    d_corr: f64,
    /// Lower-triangular Cholesky factor, row-major `n x n`.
    chol: Vec<f64>,
}

impl ShadowingGrid {
    pub fn new(area: Area, sigma_s: f64, d_corr: f64, spacing: f64) -> Result<Self> {
        if !(sigma_s >= 0.0) || !(d_corr > 0.0) || !(spacing > 0.0) {
            return Err(Error::Domain(format!(
                "shadowing needs sigma_s ≥ 0, d_corr > 0, spacing > 0 \
                 (got {sigma_s}, {d_corr}, {spacing})"
            )));
        }
        let mut spacing = spacing;
        let (nx, ny) = loop {
            let nx = (area.width / spacing).ceil() as usize + 1;
            let ny = (area.height / spacing).ceil() as usize + 1;
            if nx * ny <= MAX_NODES {
                break (nx, ny);
            }
            spacing *= 1.25;
        };
        let chol = if sigma_s == 0.0 {
            Vec::new()
        } else {
            let n = nx * ny;
            let node = |i: usize| ((i % nx) as f64 * spacing, (i / nx) as f64 * spacing);
            let mut cov = vec![0.0; n * n];
            for i in 0..n {
                let (xi, yi) = node(i);
                for j in 0..=i {
                    let (xj, yj) = node(j);
                    let d = ((xi - xj).powi(2) + (yi - yj).powi(2)).sqrt();
                    cov[i * n + j] = sigma_s * sigma_s * (-d / d_corr).exp();
                }
                cov[i * n + i] += 1e-10 * sigma_s * sigma_s;
            }
            cholesky_in_place(&mut cov, n)?;
            cov
        };
        Ok(Self {
            nx,
            ny,
            spacing,
            sigma: sigma_s,
            d_corr,
            chol,
        })
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn node_count(&self) -> usize {
        self.nx * self.ny
    }

    /// Draw one field realization.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ShadowingField {
        let n = self.node_count();
        if self.sigma == 0.0 {
            return ShadowingField {
                values: vec![0.0; n],
                nx: self.nx,
                ny: self.ny,
                spacing: self.spacing,
                sigma: 0.0,
                d_corr: self.d_corr,
            };
        }
        let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let values = (0..n)
            .map(|i| {
                let row = &self.chol[i * n..i * n + i + 1];
                row.iter().zip(&z).map(|(l, z)| l * z).sum()
            })
            .collect();
        ShadowingField {
            values,
            nx: self.nx,
            ny: self.ny,
            spacing: self.spacing,
            sigma: self.sigma,
            d_corr: self.d_corr,
        }
    }
}

/// One realization of the shadowing field, in dB.
#[derive(Debug, Clone)]
pub struct ShadowingField {
    values: Vec<f64>,
    nx: usize,
    ny: usize,
    spacing: f64,
    sigma: f64,
    d_corr: f64,
}

impl ShadowingField {
    /// Field value at a point; points outside the grid are clamped to it.
    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        if self.sigma == 0.0 {
            return 0.0;
        }
        let gx = (x / self.spacing).clamp(0.0, (self.nx - 1) as f64);
        let gy = (y / self.spacing).clamp(0.0, (self.ny - 1) as f64);
        let ix = (gx.floor() as usize).min(self.nx.saturating_sub(2));
        let iy = (gy.floor() as usize).min(self.ny.saturating_sub(2));
        let fx = gx - ix as f64;
        let fy = gy - iy as f64;
        let at =
            |i: usize, j: usize| self.values[(j.min(self.ny - 1)) * self.nx + i.min(self.nx - 1)];
        let top = at(ix, iy) * (1.0 - fx) + at(ix + 1, iy) * fx;
        let bottom = at(ix, iy + 1) * (1.0 - fx) + at(ix + 1, iy + 1) * fx;
        top * (1.0 - fy) + bottom * fy
    }

    /// Shadowing on the link between `a` and `b`, in dB.
    pub fn link(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        shadowing_at(a, b, self, self.d_corr)
    }
}

/// Link shadowing `(1 - ρ) / (√2 · √(1 + ρ)) · (S(a) + S(b))` with
/// `ρ = exp(-d / d_corr)`; its variance is `σ² (1 - ρ)²`.
pub fn shadowing_at(a: (f64, f64), b: (f64, f64), field: &ShadowingField, d_corr: f64) -> f64 {
    if field.sigma == 0.0 {
        return 0.0;
    }
    let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let rho = (-d / d_corr).exp();
    let scale = (1.0 - rho) / (2.0f64.sqrt() * (1.0 + rho).sqrt());
    scale * (field.value_at(a.0, a.1) + field.value_at(b.0, b.1))
}

fn cholesky_in_place(a: &mut [f64], n: usize) -> Result<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 {
            return Err(Error::Domain(
                "shadowing covariance not positive definite".into(),
            ));
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = s / d;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            a[i * n + j] = 0.0;
        }
    }
    Ok(())
}

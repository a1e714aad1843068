use crate::error::{Error, Result};

/// Steady state of the per-LAP queue with Bernoulli(`p_arr`) arrivals and
/// Bernoulli(`lambda`) service.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueueSteadyState {
    pub p_arr: f64,
    pub lambda: f64,
    pub rho: f64,
    pub q0: f64,
    pub q1: f64,
}

impl QueueSteadyState {
    /// Probability of `j` updates in the queue.
    pub fn q(&self, j: usize) -> f64 {
        match j {
            0 => self.q0,
            _ => self.q1 * self.rho.powi(j as i32 - 1),
        }
    }

    /// Per-slot probability that the tagged update leaves: `Λ(1-ρ)`.
    pub fn departure_rate(&self) -> f64 {
        self.lambda * (1.0 - self.rho)
    }
}

fn check(p_arr: f64, lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p_arr) {
        return Err(Error::Domain(format!("p_arr ∉ [0,1] (got {p_arr})")));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::Domain(format!("Λ ∉ (0,1] (got {lambda})")));
    }
    Ok(())
}

pub fn queue_steady_state(p_arr: f64, lambda: f64) -> Result<QueueSteadyState> {
    check(p_arr, lambda)?;
    if p_arr == 0.0 {
        return Ok(QueueSteadyState {
            p_arr,
            lambda,
            rho: 0.0,
            q0: 1.0,
            q1: 0.0,
        });
    }
    let r = p_arr * (1.0 - lambda);
    let s = lambda * (1.0 - p_arr);
    let rho = if r == 0.0 { 0.0 } else { r / s };
    if !(rho < 1.0) {
        return Err(Error::Unstable { rho });
    }
    let q1 = p_arr * (1.0 - rho) / lambda;
    let q0 = s / p_arr * q1;
    Ok(QueueSteadyState {
        p_arr,
        lambda,
        rho,
        q0,
        q1,
    })
}

/// `f_T(t)`: probability that an update's delay is `t` slots.
pub fn delay_pmf(p_arr: f64, lambda: f64, t: u64) -> Result<f64> {
    if t == 0 {
        return Err(Error::Domain("delay must be at least one slot".into()));
    }
    let mu = queue_steady_state(p_arr, lambda)?.departure_rate();
    Ok(mu * (1.0 - mu).powf((t - 1) as f64))
}

/// `P_D`: probability that an update is not delivered within `d` slots.
pub fn deadline_violation(p_arr: f64, lambda: f64, d: u32) -> Result<f64> {
    if d == 0 {
        return Err(Error::Domain("deadline must be at least one slot".into()));
    }
    let mu = queue_steady_state(p_arr, lambda)?.departure_rate();
    Ok((1.0 - mu).powi(d as i32))
}

pub fn p_timely(p_arr: f64, lambda: f64, d: u32) -> Result<f64> {
    deadline_violation(p_arr, lambda, d).map(|pd| 1.0 - pd)
}

//! Closed-form model: success probability on the collision channel, the
//! per-LAP queue's steady state, delay distribution and deadline-violation
//! probability, and an exhaustive optimizer for tiny networks.

mod brute;
mod psi;
mod queue;
mod success;

pub use brute::{
    brute_force_optimal_psi, expected_successes, simplex_grid, BruteForceResult,
    BRUTE_MAX_CHANNELS, BRUTE_MAX_LAPS,
};
pub use psi::{PsiMatrix, ROW_SUM_TOL};
pub use queue::{deadline_violation, delay_pmf, p_timely, queue_steady_state, QueueSteadyState};
pub use success::{success_prob, MAX_CHANNELS, MAX_LAPS};

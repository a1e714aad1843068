use crate::config::Schedule;

/// `max(floor, start - step · events)`.
pub fn epsilon_at(event_count: u64, s: &Schedule) -> f64 {
    (s.eps_start - s.eps_step * event_count as f64).max(s.eps_floor)
}

/// `max(floor, lr0 · (1 - decay)^events)`.
pub fn lr_at(event_count: u64, lr0: f64, s: &Schedule) -> f64 {
    let n = i32::try_from(event_count).unwrap_or(i32::MAX);
    (lr0 * (1.0 - s.lr_decay).powi(n)).max(s.lr_floor)
}

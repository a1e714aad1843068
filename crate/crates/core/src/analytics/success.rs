use super::PsiMatrix;
use crate::access::AccessConfig;
use crate::error::{Error, Result};

pub const MAX_LAPS: usize = 6;
pub const MAX_CHANNELS: usize = 4;

/// Probability that some channel carries exactly one transmitter when each
/// LAP is active with probability `p_act` and draws its configuration from
/// its row of `psi`.
///
/// Per-channel transmitter counts saturate at 2, so the joint distribution
/// over `3^M` count states is built one LAP at a time.
pub fn success_prob(psi: &PsiMatrix, p_act: f64) -> Result<f64> {
    let (k, m) = (psi.laps(), psi.channels());
    if k > MAX_LAPS || m > MAX_CHANNELS {
        return Err(Error::Infeasible(format!(
            "K = {k}, M = {m} exceeds K <= {MAX_LAPS}, M <= {MAX_CHANNELS}"
        )));
    }
    if !(0.0..=1.0).contains(&p_act) {
        return Err(Error::Domain(format!("p_act ∉ [0,1] (got {p_act})")));
    }
    let states = 3usize.pow(m as u32);
    let pow3: Vec<usize> = (0..m).map(|c| 3usize.pow(c as u32)).collect();
    let digit = |s: usize, c: usize| (s / pow3[c]) % 3;

    // transition[s][i]: count state after adding configuration i to s
    let transition: Vec<Vec<usize>> = (0..states)
        .map(|s| {
            (0..psi.actions())
                .map(|i| {
                    let cfg = AccessConfig::from_index(i, m).expect("index below 2^M");
                    cfg.active_channels()
                        .filter(|&c| digit(s, c) < 2)
                        .fold(s, |acc, c| acc + pow3[c])
                })
                .collect()
        })
        .collect();

    let mut dist = vec![0.0; states];
    dist[0] = 1.0;
    for row in psi.rows() {
        let mut next = vec![0.0; states];
        for (s, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            next[s] += mass * (1.0 - p_act);
            for (i, &w) in row.iter().enumerate() {
                if w > 0.0 {
                    next[transition[s][i]] += mass * p_act * w;
                }
            }
        }
        dist = next;
    }
    Ok((0..states)
        .filter(|&s| (0..m).any(|c| digit(s, c) == 1))
        .map(|s| dist[s])
        .sum())
}

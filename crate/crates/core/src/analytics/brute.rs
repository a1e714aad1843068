use rayon::prelude::*;

use super::{success_prob, PsiMatrix};
use crate::access::{action_count, AccessConfig};
use crate::error::{Error, Result};

pub const BRUTE_MAX_LAPS: usize = 3;
pub const BRUTE_MAX_CHANNELS: usize = 2;
/// Values of `Λ` closer than this are treated as equal.
pub const TIE_TOL: f64 = 1e-12;

/// Best `Ψ` found by exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    pub psi: PsiMatrix,
    pub lambda_star: f64,
    /// Expected number of acknowledged LAPs per slot under `psi`.
    pub expected_successes: f64,
    pub candidates: usize,
}

/// Every row on the simplex grid with step `1 / resolution`.
/// Resolution 1 gives the deterministic rows.
pub fn simplex_grid(width: usize, resolution: usize) -> Vec<Vec<f64>> {
    fn fill(left: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for take in (0..=left).rev() {
            prefix.push(take);
            fill(left - take, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut parts = Vec::new();
    fill(resolution, width, &mut Vec::new(), &mut parts);
    parts
        .into_iter()
        .map(|p| {
            p.into_iter()
                .map(|x| x as f64 / resolution as f64)
                .collect()
        })
        .collect()
}

/// Expected number of LAPs that are alone on at least one of their channels,
/// by enumeration of activation sets and joint configurations.
pub fn expected_successes(psi: &PsiMatrix, p_act: f64) -> f64 {
    let (k, m) = (psi.laps(), psi.channels());
    let a = action_count(m);
    let configs: Vec<AccessConfig> = (0..a)
        .map(|i| AccessConfig::from_index(i, m).expect("index below 2^M"))
        .collect();
    let mut total = 0.0;
    let joint = a.pow(k as u32);
    for active in 0u32..(1 << k) {
        let on = active.count_ones() as i32;
        let w_act = p_act.powi(on) * (1.0 - p_act).powi(k as i32 - on);
        if w_act == 0.0 {
            continue;
        }
        for mut code in 0..joint {
            let mut choice = vec![0usize; k];
            let mut w = w_act;
            for (n, c) in choice.iter_mut().enumerate() {
                *c = code % a;
                code /= a;
                if active & (1 << n) != 0 {
                    w *= psi.row(n)[*c];
                } else if *c != 0 {
                    w = 0.0;
                }
            }
            if w == 0.0 {
                continue;
            }
            let mut counts = vec![0u32; m];
            for &c in &choice {
                for ch in configs[c].active_channels() {
                    counts[ch] += 1;
                }
            }
            let wins = choice
                .iter()
                .filter(|&&c| configs[c].active_channels().any(|ch| counts[ch] == 1))
                .count();
            total += w * wins as f64;
        }
    }
    total
}

/// Search every `Ψ` whose rows lie on the simplex grid and return one that
/// maximizes `Λ`. Among maximizers the one with the most expected
/// acknowledged LAPs is kept; remaining ties go to the first candidate.
pub fn brute_force_optimal_psi(
    k: usize,
    m: usize,
    p_act: f64,
    resolution: usize,
) -> Result<BruteForceResult> {
    if k == 0 || k > BRUTE_MAX_LAPS || m == 0 || m > BRUTE_MAX_CHANNELS {
        return Err(Error::Infeasible(format!(
            "brute force needs 1 <= K <= {BRUTE_MAX_LAPS} and 1 <= M <= {BRUTE_MAX_CHANNELS} (got K = {k}, M = {m})"
        )));
    }
    if resolution == 0 {
        return Err(Error::Domain("grid resolution must be at least 1".into()));
    }
    let rows = simplex_grid(action_count(m), resolution);
    let candidates = rows.len().pow(k as u32);
    let scored: Vec<(f64, f64)> = (0..candidates)
        .into_par_iter()
        .map(|code| {
            let psi = candidate(&rows, code, k, m);
            let lambda = success_prob(&psi, p_act).expect("within guard");
            (lambda, expected_successes(&psi, p_act))
        })
        .collect();

    let mut best = 0;
    for (i, &(lambda, wins)) in scored.iter().enumerate().skip(1) {
        let (bl, bw) = scored[best];
        if lambda > bl + TIE_TOL || (lambda >= bl - TIE_TOL && wins > bw + TIE_TOL) {
            best = i;
        }
    }
    let (lambda_star, expected_successes) = scored[best];
    Ok(BruteForceResult {
        psi: candidate(&rows, best, k, m),
        lambda_star,
        expected_successes,
        candidates,
    })
}

fn candidate(rows: &[Vec<f64>], mut code: usize, k: usize, m: usize) -> PsiMatrix {
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        chosen.push(rows[code % rows.len()].clone());
        code /= rows.len();
    }
    PsiMatrix::new(chosen, m).expect("grid rows are distributions")
}

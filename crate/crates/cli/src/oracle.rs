use clap::Args;
use csra_core::analytics::{brute_force_optimal_psi, deadline_violation, success_prob, PsiMatrix};
use csra_core::rng::{stream, Stream};
use csra_core::sim::sample_collision_slots;
use csra_core::Error;

use crate::CliError;

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Monte Carlo slots per comparison.
    #[arg(long, default_value_t = 1_000_000)]
    pub slots: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Simplex grid resolution for the exhaustive search.
    #[arg(long, default_value_t = 1)]
    pub resolution: usize,
}

struct Report {
    failed: usize,
}

impl Report {
    fn check(&mut self, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn monte_carlo(psi: &PsiMatrix, p_act: f64, slots: u64, seed: u64) -> (f64, f64) {
    let s = sample_collision_slots(
        psi,
        p_act,
        slots,
        &mut stream(seed, Stream::Activation),
        &mut stream(seed, Stream::Exploration),
    );
    (s.success_frequency(), s.std_error())
}

pub fn oracle(args: &OracleArgs) -> Result<(), CliError> {
    let mut r = Report { failed: 0 };

    let cases = [
        (
            "lambda K=2 M=1 p=0.5 always-transmit",
            PsiMatrix::deterministic(&[1, 1], 1)?,
            0.5,
        ),
        (
            "lambda K=3 M=2 p=0.4 random hopping",
            PsiMatrix::single_channel_uniform(3, 2),
            0.4,
        ),
        (
            "lambda K=4 M=3 p=0.3 random psi",
            PsiMatrix::random(4, 3, &mut stream(args.seed, Stream::Init)),
            0.3,
        ),
    ];
    for (name, psi, p) in cases {
        let formula = success_prob(&psi, p)?;
        let (mc, se) = monte_carlo(&psi, p, args.slots, args.seed);
        let delta = (mc - formula).abs();
        r.check(
            name,
            delta <= 3.0 * se.max(1e-12),
            format!("formula {formula:.6} vs Monte Carlo {mc:.6} ± {se:.6} (delta {delta:.2e})"),
        );
    }

    let pd = deadline_violation(0.2, 0.5, 20)?;
    r.check(
        "P_D p_a=0.2 lambda=0.5 D=20",
        (pd - 8.27e-5).abs() < 5e-8,
        format!("{pd:.4e}"),
    );

    let best = brute_force_optimal_psi(2, 2, 1.0, args.resolution)?;
    let orthogonal = match (
        best.psi.deterministic_choice(0),
        best.psi.deterministic_choice(1),
    ) {
        (Some(a), Some(b)) => a.count_ones() == 1 && b.count_ones() == 1 && a != b,
        _ => false,
    };
    r.check(
        "brute force K=2 M=2 p=1",
        best.lambda_star == 1.0 && orthogonal,
        format!(
            "lambda* = {} over {} candidates",
            best.lambda_star, best.candidates
        ),
    );

    let best = brute_force_optimal_psi(3, 2, 1.0, args.resolution)?;
    let (mc, se) = monte_carlo(&best.psi, 1.0, args.slots, args.seed);
    let delta = (mc - best.lambda_star).abs();
    r.check(
        "brute force K=3 M=2 p=1",
        delta <= 0.01,
        format!(
            "lambda* = {} vs Monte Carlo {mc:.6} ± {se:.6}; psi rows {:?}",
            best.lambda_star,
            best.psi.rows()
        ),
    );

    match brute_force_optimal_psi(10, 3, 0.4, args.resolution) {
        Err(e @ Error::Infeasible(_)) => r.check("brute force K=10 guard", true, e.to_string()),
        other => r.check(
            "brute force K=10 guard",
            false,
            format!("unexpected {other:?}"),
        ),
    }

    if r.failed == 0 {
        Ok(())
    } else {
        Err(CliError::runtime(format!("{} check(s) failed", r.failed)))
    }
}

use csra_core::analytics::{
    brute_force_optimal_psi, deadline_violation, delay_pmf, queue_steady_state, success_prob,
    PsiMatrix,
};
use csra_core::rng::{stream, Stream};
use csra_core::sim::sample_collision_slots;
use csra_core::Error;
use proptest::prelude::*;

/// Sum over every activity subset and every joint configuration, with the
/// success indicator taken straight from per-channel counts.
fn naive_success(psi: &PsiMatrix, p: f64) -> f64 {
    let k = psi.laps();
    let m = psi.channels();
    let a = 1usize << m;
    let mut total = 0.0;
    for active in 0u32..(1 << k) {
        let laps: Vec<usize> = (0..k).filter(|n| active >> n & 1 == 1).collect();
        let p_set = (0..k)
            .map(|n| if active >> n & 1 == 1 { p } else { 1.0 - p })
            .product::<f64>();
        if p_set == 0.0 {
            continue;
        }
        let joint = a.pow(laps.len() as u32);
        for code in 0..joint {
            let mut rest = code;
            let mut prob = 1.0;
            let mut counts = vec![0; m];
            for &n in &laps {
                let cfg = rest % a;
                rest /= a;
                prob *= psi.row(n)[cfg];
                for (c, count) in counts.iter_mut().enumerate() {
                    if cfg >> c & 1 == 1 {
                        *count += 1;
                    }
                }
            }
            if counts.contains(&1) {
                total += p_set * prob;
            }
        }
    }
    total
}

fn random_instance(seed: u64) -> (PsiMatrix, f64) {
    use rand::Rng;
    let mut rng = stream(seed, Stream::Init);
    let k = rng.random_range(1..=4);
    let m = rng.random_range(1..=3);
    let p = rng.random_range(0.05..=1.0);
    (PsiMatrix::random(k, m, &mut rng), p)
}

#[test]
fn dp_matches_naive_enumeration() {
    for seed in 0..200 {
        let (psi, p) = random_instance(seed);
        if psi.laps() > 3 {
            continue;
        }
        let dp = success_prob(&psi, p).unwrap();
        let naive = naive_success(&psi, p);
        assert!((dp - naive).abs() < 1e-12, "seed {seed}: {dp} vs {naive}");
    }
}

#[test]
fn success_prob_examples() {
    let always = PsiMatrix::deterministic(&[1], 1).unwrap();
    assert_eq!(success_prob(&always, 1.0).unwrap(), 1.0);
    let two = PsiMatrix::deterministic(&[1, 1], 1).unwrap();
    // exactly one of the two active
    assert!((success_prob(&two, 0.5).unwrap() - 0.5).abs() < 1e-15);
    let rch = PsiMatrix::single_channel_uniform(3, 2);
    assert!((success_prob(&rch, 0.4).unwrap() - 0.624).abs() < 1e-12);
}

#[test]
fn all_silent_never_succeeds() {
    for (k, m) in [(1, 1), (3, 2), (6, 4)] {
        let psi = PsiMatrix::deterministic(&vec![0; k], m).unwrap();
        assert_eq!(success_prob(&psi, 0.7).unwrap(), 0.0);
    }
}

#[test]
fn guard_rejects_large_instances() {
    let psi = PsiMatrix::single_channel_uniform(7, 2);
    assert!(matches!(success_prob(&psi, 0.5), Err(Error::Infeasible(_))));
    let psi = PsiMatrix::single_channel_uniform(2, 5);
    assert!(matches!(success_prob(&psi, 0.5), Err(Error::Infeasible(_))));
}

#[test]
fn monte_carlo_within_three_standard_errors() {
    for i in 0..20 {
        let (psi, p) = random_instance(1000 + i);
        let exact = success_prob(&psi, p).unwrap();
        let s = sample_collision_slots(
            &psi,
            p,
            1_000_000,
            &mut stream(i, Stream::Activation),
            &mut stream(i, Stream::Exploration),
        );
        let se = s.std_error().max(1e-9);
        let diff = (s.success_frequency() - exact).abs();
        assert!(diff <= 3.0 * se, "instance {i}: diff {diff} > 3 x {se}");
    }
}

fn permute_channels(psi: &PsiMatrix, perm: &[usize]) -> PsiMatrix {
    let m = psi.channels();
    let rows = psi
        .rows()
        .iter()
        .map(|row| {
            let mut out = vec![0.0; row.len()];
            for (i, &w) in row.iter().enumerate() {
                let j = (0..m)
                    .filter(|&c| i >> c & 1 == 1)
                    .map(|c| 1 << perm[c])
                    .sum::<usize>();
                out[j] = w;
            }
            out
        })
        .collect();
    PsiMatrix::new(rows, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariant_under_lap_relabeling(seed in 0u64..10_000, shift in 0usize..4) {
        let (psi, p) = random_instance(seed);
        let mut rows = psi.rows().to_vec();
        let len = rows.len();
        rows.rotate_left(shift % len);
        rows.reverse();
        let relabeled = PsiMatrix::new(rows, psi.channels()).unwrap();
        let a = success_prob(&psi, p).unwrap();
        let b = success_prob(&relabeled, p).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn invariant_under_channel_relabeling(seed in 0u64..10_000, swap in 0usize..3) {
        let (psi, p) = random_instance(seed);
        let m = psi.channels();
        let mut perm: Vec<usize> = (0..m).collect();
        perm.swap(swap % m, m - 1);
        let relabeled = permute_channels(&psi, &perm);
        let a = success_prob(&psi, p).unwrap();
        let b = success_prob(&relabeled, p).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn queue_distribution_sums_to_one(p_arr in 0.001f64..0.95, lambda in 0.01f64..=1.0) {
        let rho_num = p_arr * (1.0 - lambda);
        let rho_den = lambda * (1.0 - p_arr);
        prop_assume!(rho_num < 0.99 * rho_den);
        let q = queue_steady_state(p_arr, lambda).unwrap();
        let mut sum = 0.0;
        let mut j = 0;
        while j < 100_000 {
            let v = q.q(j);
            prop_assert!(v >= 0.0);
            sum += v;
            if j > 0 && v < 1e-18 {
                break;
            }
            j += 1;
        }
        prop_assert!((sum - 1.0).abs() < 1e-9, "sum {}", sum);
    }

    #[test]
    fn violation_monotone(p_arr in 0.01f64..0.5, l1 in 0.5f64..=1.0, l2 in 0.5f64..=1.0, d in 1u32..40) {
        let (lo, hi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
        prop_assume!(p_arr * (1.0 - lo) < lo * (1.0 - p_arr));
        let a = deadline_violation(p_arr, lo, d).unwrap();
        let b = deadline_violation(p_arr, hi, d).unwrap();
        prop_assert!(b <= a + 1e-15);
        let longer = deadline_violation(p_arr, lo, d + 1).unwrap();
        prop_assert!(longer <= a + 1e-15);
    }
}

#[test]
fn queue_examples() {
    let q = queue_steady_state(0.2, 0.5).unwrap();
    assert!((q.rho - 0.25).abs() < 1e-15);
    assert!((q.q1 - 0.3).abs() < 1e-15);
    assert!((q.q0 - 0.6).abs() < 1e-15);
    assert_eq!(queue_steady_state(0.2, 1.0).unwrap().rho, 0.0);
    assert!(matches!(
        queue_steady_state(0.4, 0.4),
        Err(Error::Unstable { .. })
    ));
    assert!((delay_pmf(0.2, 0.5, 1).unwrap() - 0.375).abs() < 1e-15);
    assert_eq!(delay_pmf(0.2, 1.0, 1).unwrap(), 1.0);
    assert_eq!(delay_pmf(0.2, 1.0, 2).unwrap(), 0.0);
    let total: f64 = (1..2000).map(|t| delay_pmf(0.2, 0.5, t).unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(deadline_violation(0.3, 1.0, 7).unwrap(), 0.0);
    let pd = deadline_violation(0.2, 0.5, 20).unwrap();
    assert!((pd - 0.625f64.powi(20)).abs() < 1e-18);
    assert!((pd - 8.27e-5).abs() < 5e-8);
    assert!((deadline_violation(0.2, 0.5, 1).unwrap() - 0.625).abs() < 1e-15);
}

#[test]
fn brute_force_examples() {
    let one = brute_force_optimal_psi(1, 1, 1.0, 1).unwrap();
    assert_eq!(one.lambda_star, 1.0);
    assert_eq!(one.psi.deterministic_choice(0).map(|c| c.index()), Some(1));

    let two = brute_force_optimal_psi(2, 2, 1.0, 1).unwrap();
    assert_eq!(two.lambda_star, 1.0);
    let a = two.psi.deterministic_choice(0).unwrap();
    let b = two.psi.deterministic_choice(1).unwrap();
    assert_eq!((a.count_ones(), b.count_ones()), (1, 1));
    assert_ne!(a, b);

    assert!(matches!(
        brute_force_optimal_psi(4, 2, 1.0, 1),
        Err(Error::Infeasible(_))
    ));
}

#[test]
fn brute_force_optimum_agrees_with_monte_carlo() {
    let best = brute_force_optimal_psi(3, 2, 1.0, 1).unwrap();
    let baseline = success_prob(&PsiMatrix::single_channel_uniform(3, 2), 1.0).unwrap();
    assert!(best.lambda_star >= baseline);
    let s = sample_collision_slots(
        &best.psi,
        1.0,
        1_000_000,
        &mut stream(9, Stream::Activation),
        &mut stream(9, Stream::Exploration),
    );
    assert!((s.success_frequency() - best.lambda_star).abs() <= 0.01);
}

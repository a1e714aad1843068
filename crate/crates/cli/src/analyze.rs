use std::path::PathBuf;

use clap::Args;
use csra_core::analytics::{
    deadline_violation, delay_pmf, queue_steady_state, success_prob, PsiMatrix,
};

use crate::{require_file, CliError};

/// Either `--lambda` directly, or `--psi` with `--m` and `--p-act` to
/// compute it. Queue outputs need `--p-arr`.
#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Arrival probability of the per-LAP queue.
    #[arg(long)]
    pub p_arr: Option<f64>,
    /// Per-slot success probability.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Deadline in slots.
    #[arg(long, default_value_t = 20)]
    pub deadline: u32,
    /// Number of LAPs; checked against the rows of the file if given.
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of channels.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub p_act: Option<f64>,
    /// CSV with one row per LAP and 2^M columns.
    #[arg(long)]
    pub psi: Option<PathBuf>,
    /// Delay PMF terms to print.
    #[arg(long, default_value_t = 5)]
    pub pmf_terms: u64,
}

pub fn analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let lambda = match (&args.psi, args.lambda) {
        (Some(path), None) => {
            require_file(path)?;
            let m = args.m.ok_or_else(|| CliError::usage("--psi needs --m"))?;
            let p_act = args
                .p_act
                .ok_or_else(|| CliError::usage("--psi needs --p-act"))?;
            let psi = PsiMatrix::from_csv_file(path, m)?;
            if let Some(k) = args.k {
                if k != psi.laps() {
                    return Err(CliError::usage(format!(
                        "--k {k} but {} has {} rows",
                        path.display(),
                        psi.laps()
                    )));
                }
            }
            let lambda = success_prob(&psi, p_act)?;
            println!("K = {}, M = {m}, p_act = {p_act}", psi.laps());
            println!("lambda = {lambda}");
            lambda
        }
        (None, Some(lambda)) => lambda,
        (Some(_), Some(_)) => {
            return Err(CliError::usage("give either --lambda or --psi, not both"))
        }
        (None, None) => return Err(CliError::usage("give --lambda or --psi")),
    };

    let Some(p_arr) = args.p_arr else {
        return Ok(());
    };
    let q = queue_steady_state(p_arr, lambda)?;
    println!("p_arr = {p_arr}, lambda = {lambda}, D = {}", args.deadline);
    println!("rho = {}", q.rho);
    println!("Q_0 = {}", q.q0);
    println!("Q_1 = {}", q.q1);
    for t in 1..=args.pmf_terms {
        println!("f_T({t}) = {}", delay_pmf(p_arr, lambda, t)?);
    }
    let pd = deadline_violation(p_arr, lambda, args.deadline)?;
    println!("P_D = {pd:e}");
    println!("P_timely = {}", 1.0 - pd);
    Ok(())
}

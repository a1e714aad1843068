use csra_core::experiment::{run_sweep, write_sweep, SweepSpec};

use crate::{require_file, CliError, SweepArgs};

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    require_file(&args.config)?;
    let mut spec = SweepSpec::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        spec.base.seed = seed;
    }
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let outcome = run_sweep(&spec, workers, args.horizon)?;
    let files = write_sweep(&outcome, &args.out_dir)?;
    println!("raw: {}", files.raw.display());
    println!("aggregated: {}", files.aggregated.display());
    match files.manifest {
        None => Ok(()),
        Some(path) => Err(CliError::runtime(format!(
            "{} run(s) failed, {} skipped; see {}",
            outcome.failures.len(),
            outcome.skipped,
            path.display()
        ))),
    }
}

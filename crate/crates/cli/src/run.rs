use std::fs::{self, File};
use std::io::BufWriter;

use csra_core::config::{PolicyKind, SimConfig};
use csra_core::sim::{Engine, METRICS_HEADER};

use crate::{require_file, CliError, RunArgs};

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    require_file(&args.config)?;
    let mut cfg = SimConfig::from_file(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(h) = args.horizon {
        cfg.horizon = h;
    }
    if let Some(p) = &args.policy {
        cfg.policy = p.parse::<PolicyKind>().map_err(CliError::usage)?;
    }
    cfg.validate()?;

    let mut engine = Engine::new(&cfg)?;
    if let Some(path) = &args.event_log {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        engine.set_event_log(Box::new(BufWriter::new(File::create(path)?)))?;
    }
    let metrics = engine.run()?;

    fs::create_dir_all(&args.out_dir)?;
    let path = args.out_dir.join("metrics.csv");
    let row = metrics.csv_row();
    fs::write(&path, format!("{METRICS_HEADER}\n{row}\n"))?;
    println!("{METRICS_HEADER}");
    println!("{row}");
    log::info!("{metrics}");
    Ok(())
}

//! Parameter sweeps: replicated runs of every compared policy over one swept
//! key, with raw and aggregated CSV output.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use crate::config::{PolicyKind, SimConfig};
use crate::error::{Error, Result};
use crate::rng::fnv1a;
use crate::sim::{engine_run, RunMetrics, METRICS_HEADER};

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepKey {
    K,
    M,
    PAct,
}

impl fmt::Display for SweepKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepKey::K => "K",
            SweepKey::M => "M",
            SweepKey::PAct => "p_act",
        })
    }
}

impl FromStr for SweepKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "K" => Ok(SweepKey::K),
            "M" => Ok(SweepKey::M),
            "p_act" => Ok(SweepKey::PAct),
            other => Err(Error::Domain(format!(
                "sweep key must be K, M or p_act (got {other:?})"
            ))),
        }
    }
}

impl SweepKey {
    /// `base` with the swept key set to `value`.
    pub fn apply(&self, base: &SimConfig, value: f64) -> Result<SimConfig> {
        let mut cfg = base.clone();
        match self {
            SweepKey::K | SweepKey::M => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::Domain(format!(
                        "{self} must be a positive integer (got {value})"
                    )));
                }
                if *self == SweepKey::K {
                    cfg.k = value as usize;
                } else {
                    // batch and replay sizes scale with the action count
                    // unless they were tuned explicitly
                    let default_batch = base.actions() * 30;
                    let default_capacity = default_batch * 10;
                    cfg.m = value as usize;
                    if base.batch == default_batch {
                        cfg.batch = cfg.actions() * 30;
                    }
                    if base.replay_capacity == default_capacity {
                        cfg.replay_capacity = cfg.batch * 10;
                    }
                }
            }
            SweepKey::PAct => cfg.p_act = value,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A base config plus the key, values and replication count to sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: SimConfig,
    pub key: SweepKey,
    pub values: Vec<f64>,
    pub replications: usize,
    pub policies: Vec<PolicyKind>,
}

impl SweepSpec {
    /// Config text with three extra keys: `sweep`, `values` (comma separated)
    /// and `replications`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut key = None;
        let mut values = None;
        let mut replications = None;
        let mut rest = String::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            let parsed = body.split_once('=').map(|(k, v)| (k.trim(), v.trim()));
            let parse_err = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            match parsed {
                Some(("sweep", v)) => key = Some(v.parse::<SweepKey>()?),
                Some(("values", v)) => {
                    let list = v
                        .split(',')
                        .map(|x| {
                            x.trim()
                                .parse::<f64>()
                                .map_err(|e| parse_err(format!("values: {x:?}: {e}")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    values = Some(list);
                }
                Some(("replications", v)) => {
                    replications = Some(
                        v.parse::<usize>()
                            .map_err(|e| parse_err(format!("replications: {e}")))?,
                    )
                }
                _ => {
                    rest.push_str(line);
                    rest.push('\n');
                    continue;
                }
            }
            // keep line numbers aligned for the config parser
            rest.push('\n');
        }
        let base = SimConfig::parse(&rest)?;
        let spec = Self {
            base,
            key: key.ok_or_else(|| Error::Domain("missing `sweep` key".into()))?,
            values: values.ok_or_else(|| Error::Domain("missing `values` key".into()))?,
            replications: replications.unwrap_or(1),
            policies: PolicyKind::COMPARED.to_vec(),
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn check(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::Domain("sweep value list is empty".into()));
        }
        if self.replications == 0 {
            return Err(Error::Domain("replications must be at least 1".into()));
        }
        for &v in &self.values {
            self.key.apply(&self.base, v)?;
        }
        Ok(())
    }

    /// Every (value, policy, replication) run, in output order.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let mut out = Vec::new();
        for &value in &self.values {
            let at = self.key.apply(&self.base, value)?;
            for &policy in &self.policies {
                for replication in 0..self.replications {
                    let mut cfg = at.clone();
                    cfg.policy = policy;
                    cfg.seed = replication_seed(self.base.seed, replication, value, policy);
                    out.push(SweepPoint {
                        key: self.key,
                        value,
                        replication,
                        cfg,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// Seed of one replication: the base seed XOR a hash of
/// `replication|value|policy`.
pub fn replication_seed(base: u64, replication: usize, value: f64, policy: PolicyKind) -> u64 {
    base ^ fnv1a(format!("{replication}|{value}|{policy}").as_bytes())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub key: SweepKey,
    pub value: f64,
    pub replication: usize,
    pub cfg: SimConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub key: SweepKey,
    pub value: f64,
    pub replication: usize,
    pub metrics: RunMetrics,
}

pub fn raw_header() -> String {
    format!("sweep,value,replication,{METRICS_HEADER}")
}

impl RawRow {
    pub fn csv_record(&self) -> Vec<String> {
        let mut rec = vec![
            self.key.to_string(),
            self.value.to_string(),
            self.replication.to_string(),
        ];
        rec.extend(self.metrics.csv_record());
        rec
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub key: SweepKey,
    pub value: f64,
    pub replication: usize,
    pub policy: PolicyKind,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<RawRow>,
    pub failures: Vec<SweepFailure>,
    /// Points never started because an earlier point failed.
    pub skipped: usize,
}

/// Run every point of `spec` on up to `workers` threads. After the first
/// failure no new points are started; finished rows are kept.
pub fn run_sweep(spec: &SweepSpec, workers: usize, horizon: Option<u64>) -> Result<SweepOutcome> {
    let points = spec.points()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let failed = AtomicBool::new(false);
    let results: Vec<Option<std::result::Result<RunMetrics, String>>> = pool.install(|| {
        points
            .par_iter()
            .map(|p| {
                if failed.load(Ordering::SeqCst) {
                    return None;
                }
                let h = horizon.unwrap_or(p.cfg.horizon);
                let r = engine_run(&p.cfg, h).map_err(|e| e.to_string());
                if r.is_err() {
                    failed.store(true, Ordering::SeqCst);
                }
                log::info!(
                    "{}={} {} rep {} done",
                    p.key,
                    p.value,
                    p.cfg.policy,
                    p.replication
                );
                Some(r)
            })
            .collect()
    });
    let mut outcome = SweepOutcome {
        rows: Vec::new(),
        failures: Vec::new(),
        skipped: 0,
    };
    for (p, r) in points.into_iter().zip(results) {
        match r {
            Some(Ok(metrics)) => outcome.rows.push(RawRow {
                key: p.key,
                value: p.value,
                replication: p.replication,
                metrics,
            }),
            Some(Err(error)) => outcome.failures.push(SweepFailure {
                key: p.key,
                value: p.value,
                replication: p.replication,
                policy: p.cfg.policy,
                seed: p.cfg.seed,
                error,
            }),
            None => outcome.skipped += 1,
        }
    }
    Ok(outcome)
}

/// Sample mean and 95% normal half-width over the finite entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub n: usize,
    pub mean: f64,
    pub half_width: f64,
}

impl MeanCi {
    pub fn from_samples(xs: &[f64]) -> Self {
        let finite: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
        let n = finite.len();
        if n == 0 {
            return Self {
                n,
                mean: f64::NAN,
                half_width: f64::NAN,
            };
        }
        let mean = finite.iter().sum::<f64>() / n as f64;
        let half_width = if n < 2 {
            0.0
        } else {
            let var = finite.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            Z95 * (var / n as f64).sqrt()
        };
        Self {
            n,
            mean,
            half_width,
        }
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.half_width
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.half_width
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub key: SweepKey,
    pub value: f64,
    pub method: PolicyKind,
    pub replications: usize,
    pub p_timely: MeanCi,
    pub mean_delay: MeanCi,
    pub collision_rate: MeanCi,
}

pub const AGGREGATE_HEADER: &str = "sweep,value,method,replications,P_timely_mean,P_timely_ci95,mean_delay_mean,mean_delay_ci95,collision_rate_mean,collision_rate_ci95";

impl AggregateRow {
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.key.to_string(),
            self.value.to_string(),
            self.method.to_string(),
            self.replications.to_string(),
            self.p_timely.mean.to_string(),
            self.p_timely.half_width.to_string(),
            self.mean_delay.mean.to_string(),
            self.mean_delay.half_width.to_string(),
            self.collision_rate.mean.to_string(),
            self.collision_rate.half_width.to_string(),
        ]
    }
}

/// One row per (value, method), in first-seen order.
pub fn aggregate(rows: &[RawRow]) -> Vec<AggregateRow> {
    let mut groups: Vec<(SweepKey, f64, PolicyKind, Vec<&RunMetrics>)> = Vec::new();
    for r in rows {
        let m = &r.metrics;
        match groups
            .iter_mut()
            .find(|g| g.0 == r.key && g.1 == r.value && g.2 == m.method)
        {
            Some(g) => g.3.push(m),
            None => groups.push((r.key, r.value, m.method, vec![m])),
        }
    }
    groups
        .into_iter()
        .map(|(key, value, method, ms)| {
            let col = |f: fn(&RunMetrics) -> f64| {
                MeanCi::from_samples(&ms.iter().map(|m| f(m)).collect::<Vec<_>>())
            };
            AggregateRow {
                key,
                value,
                method,
                replications: ms.len(),
                p_timely: col(|m| m.p_timely),
                mean_delay: col(|m| m.mean_delay),
                collision_rate: col(|m| m.collision_rate),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    NonIncreasing,
    NonDecreasing,
}

/// Whether consecutive points follow `trend` up to 95% interval overlap:
/// a step only counts against the trend if the intervals are disjoint.
pub fn trend_holds(points: &[MeanCi], trend: Trend) -> bool {
    points.windows(2).all(|w| match trend {
        Trend::NonIncreasing => w[1].lower() <= w[0].upper(),
        Trend::NonDecreasing => w[1].upper() >= w[0].lower(),
    })
}

/// Paths written by [`write_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFiles {
    pub raw: PathBuf,
    pub aggregated: PathBuf,
    pub manifest: Option<PathBuf>,
}

/// Write `raw.csv`, `aggregated.csv` and, if anything failed, `errors.csv`.
pub fn write_sweep(outcome: &SweepOutcome, out_dir: &Path) -> Result<SweepFiles> {
    fs::create_dir_all(out_dir)?;
    let raw = out_dir.join("raw.csv");
    let mut w = csv::Writer::from_path(&raw)?;
    w.write_record(raw_header().split(','))?;
    for r in &outcome.rows {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;

    let aggregated = out_dir.join("aggregated.csv");
    let mut w = csv::Writer::from_path(&aggregated)?;
    w.write_record(AGGREGATE_HEADER.split(','))?;
    for a in aggregate(&outcome.rows) {
        w.write_record(a.csv_record())?;
    }
    w.flush()?;

    let manifest = if outcome.failures.is_empty() && outcome.skipped == 0 {
        None
    } else {
        let path = out_dir.join("errors.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["sweep", "value", "replication", "method", "seed", "error"])?;
        for f in &outcome.failures {
            w.write_record([
                f.key.to_string(),
                f.value.to_string(),
                f.replication.to_string(),
                f.policy.to_string(),
                f.seed.to_string(),
                f.error.clone(),
            ])?;
        }
        w.flush()?;
        Some(path)
    };
    Ok(SweepFiles {
        raw,
        aggregated,
        manifest,
    })
}

/// Read a raw sweep table back.
pub fn read_raw(path: &Path) -> Result<Vec<RawRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let field = |j: usize| rec.get(j).unwrap_or("");
        let num = |j: usize| -> Result<f64> {
            field(j).parse().map_err(|e| Error::Parse {
                line,
                message: format!("column {j}: {e}"),
            })
        };
        let int = |j: usize| -> Result<u64> {
            field(j).parse().map_err(|e| Error::Parse {
                line,
                message: format!("column {j}: {e}"),
            })
        };
        let metrics = RunMetrics {
            method: field(3)
                .parse()
                .map_err(|message| Error::Parse { line, message })?,
            k: int(4)? as usize,
            m: int(5)? as usize,
            p_act: num(6)?,
            p_arr: num(7)?,
            deadline: int(8)? as u32,
            seed: int(9)?,
            horizon: int(10)?,
            p_timely: num(11)?,
            mean_delay: num(12)?,
            collision_rate: num(13)?,
            generated: 0,
            delivered: 0,
            dropped: 0,
            queued_at_end: 0,
            events: 0,
            delay_hist: Vec::new(),
        };
        rows.push(RawRow {
            key: field(0).parse()?,
            value: num(1)?,
            replication: int(2)? as usize,
            metrics,
        });
    }
    Ok(rows)
}

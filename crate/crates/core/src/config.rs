//! Experiment parameterization and the flat `key = value` config format.
//!
//! Keys are case-sensitive and match the field names used throughout the
//! documentation (`K`, `M`, `p_act`, `D`, ...). Unknown keys fail the parse.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::access::{action_count, MAX_CHANNELS};
use crate::error::{Error, Result, Violation};

/// Access policy run by every LAP in a simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Neural contextual bandit driven by the contention signature.
    Dnn,
    /// Context-free epsilon-greedy bandit over all configurations.
    Mab,
    /// Random single-channel hopping.
    Rch,
    /// Always the given configuration index; used for controlled experiments.
    Fixed(usize),
}

impl PolicyKind {
    pub const COMPARED: [PolicyKind; 3] = [PolicyKind::Dnn, PolicyKind::Mab, PolicyKind::Rch];

    pub fn learns(&self) -> bool {
        matches!(self, PolicyKind::Dnn | PolicyKind::Mab)
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyKind::Dnn => f.write_str("dnn"),
            PolicyKind::Mab => f.write_str("mab"),
            PolicyKind::Rch => f.write_str("rch"),
            PolicyKind::Fixed(i) => write!(f, "fixed:{i}"),
        }
    }
}

impl FromStr for PolicyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dnn" => Ok(PolicyKind::Dnn),
            "mab" | "mab-ra" => Ok(PolicyKind::Mab),
            "rch" => Ok(PolicyKind::Rch),
            other => match other.strip_prefix("fixed:") {
                Some(i) => i
                    .parse()
                    .map(PolicyKind::Fixed)
                    .map_err(|_| format!("bad fixed policy index '{i}'")),
                None => Err(format!(
                    "unknown policy '{other}' (expected dnn, mab or rch)"
                )),
            },
        }
    }
}

/// Rectangular deployment region in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub fn new(width: f64, height: f64) -> Self {
        Self { width, height }
    }

    pub fn surface(&self) -> f64 {
        self.width * self.height
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (0.0..=self.width).contains(&x) && (0.0..=self.height).contains(&y)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.width / 2.0, self.height / 2.0)
    }
}

impl fmt::Display for Area {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.width, self.height)
    }
}

impl FromStr for Area {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (w, h) = s
            .split_once(['x', 'X', '*'])
            .ok_or_else(|| format!("expected WIDTHxHEIGHT, got '{s}'"))?;
        let w = w.trim().parse::<f64>().map_err(|e| e.to_string())?;
        let h = h.trim().parse::<f64>().map_err(|e| e.to_string())?;
        Ok(Area::new(w, h))
    }
}

/// Exploration and learning-rate schedules shared by the learning agents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    pub eps_start: f64,
    pub eps_floor: f64,
    pub eps_step: f64,
    pub lr_start: f64,
    pub lr_decay: f64,
    pub lr_floor: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Self {
            eps_start: 1.0,
            eps_floor: 0.1,
            eps_step: 0.005,
            lr_start: 0.01,
            lr_decay: 0.015,
            lr_floor: 1e-4,
        }
    }
}

/// ABG pathloss and correlated-shadowing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagation {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub fc_ghz: f64,
    pub sigma_s: f64,
    pub d_corr: f64,
}

impl Default for Propagation {
    fn default() -> Self {
        Self {
            alpha: 2.2,
            beta: 32.4,
            gamma: 2.0,
            fc_ghz: 6.0,
            sigma_s: 4.0,
            d_corr: 10.0,
        }
    }
}

/// A fully validated experiment configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Number of subnetworks (LAPs).
    pub k: usize,
    /// Number of orthogonal channels.
    pub m: usize,
    /// Per-slot activation probability of a LAP in normal mode.
    pub p_act: f64,
    /// Per-slot update arrival probability while in alarm mode.
    pub p_arr: f64,
    /// Deadline in slots, inclusive.
    pub deadline: u32,
    pub slot_ms: f64,
    pub area: Area,
    /// Subnetwork radius. Sensors are abstracted away, so this is informational.
    pub r_sub: f64,
    /// Subnetwork speed in m/s.
    pub speed: f64,
    /// Transmit SNR relative to unit-power noise, applied before the link gain.
    pub snr_db: f64,
    /// Hidden-layer width of the agent network.
    pub hidden: usize,
    /// Replay memory capacity.
    pub replay_capacity: usize,
    pub batch: usize,
    pub seed: u64,
    pub policy: PolicyKind,
    pub horizon: u64,
    /// Fraction of the horizon excluded from the metrics.
    pub warmup: f64,
    pub schedule: Schedule,
    /// Constant step size of the MAB value update.
    pub mab_step: f64,
    pub propagation: Propagation,
    pub min_sep: f64,
}

/// Queue length cap per LAP; arrivals beyond it are dropped.
pub const QUEUE_CAP: usize = 100;

impl Default for SimConfig {
    /// Defaults follow the industrial deployment used for evaluation
    /// (20 m x 20 m, 2 m/s, 3 ms slots, activation 0.4, deadline 20 slots).
    fn default() -> Self {
        validate_config(&PartialConfig::default()).expect("defaults are valid")
    }
}

impl SimConfig {
    pub fn actions(&self) -> usize {
        action_count(self.m)
    }

    pub fn slot_seconds(&self) -> f64 {
        self.slot_ms / 1000.0
    }

    pub fn snr_linear(&self) -> f64 {
        10f64.powf(self.snr_db / 10.0)
    }

    pub fn warmup_slots(&self) -> u64 {
        (self.horizon as f64 * self.warmup).floor() as u64
    }

    /// Re-check every invariant of an already constructed config.
    pub fn validate(&self) -> Result<()> {
        let v = violations(self);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(v))
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let partial = PartialConfig::parse(text)?;
        validate_config(&partial).map_err(Error::InvalidConfig)
    }

    /// Serialize back to the `key = value` format.
    pub fn to_config_string(&self) -> String {
        let s = &self.schedule;
        let p = &self.propagation;
        let pairs: Vec<(&str, String)> = vec![
            ("K", self.k.to_string()),
            ("M", self.m.to_string()),
            ("p_act", self.p_act.to_string()),
            ("p_arr", self.p_arr.to_string()),
            ("D", self.deadline.to_string()),
            ("slot_ms", self.slot_ms.to_string()),
            ("area", self.area.to_string()),
            ("r_sub", self.r_sub.to_string()),
            ("v", self.speed.to_string()),
            ("snr_db", self.snr_db.to_string()),
            ("q", self.hidden.to_string()),
            ("S", self.replay_capacity.to_string()),
            ("batch", self.batch.to_string()),
            ("seed", self.seed.to_string()),
            ("policy", self.policy.to_string()),
            ("horizon", self.horizon.to_string()),
            ("warmup", self.warmup.to_string()),
            ("eps_start", s.eps_start.to_string()),
            ("eps_floor", s.eps_floor.to_string()),
            ("eps_step", s.eps_step.to_string()),
            ("lr_start", s.lr_start.to_string()),
            ("lr_decay", s.lr_decay.to_string()),
            ("lr_floor", s.lr_floor.to_string()),
            ("mab_step", self.mab_step.to_string()),
            ("alpha", p.alpha.to_string()),
            ("beta", p.beta.to_string()),
            ("gamma", p.gamma.to_string()),
            ("fc_ghz", p.fc_ghz.to_string()),
            ("sigma_s", p.sigma_s.to_string()),
            ("d_corr", p.d_corr.to_string()),
            ("min_sep", self.min_sep.to_string()),
        ];
        pairs
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }
}

/// Config as read from a file, before defaults are filled in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PartialConfig {
    pub k: Option<usize>,
    pub m: Option<usize>,
    pub p_act: Option<f64>,
    pub p_arr: Option<f64>,
    pub deadline: Option<u32>,
    pub slot_ms: Option<f64>,
    pub area: Option<Area>,
    pub r_sub: Option<f64>,
    pub speed: Option<f64>,
    pub snr_db: Option<f64>,
    pub hidden: Option<usize>,
    pub replay_capacity: Option<usize>,
    pub batch: Option<usize>,
    pub seed: Option<u64>,
    pub policy: Option<PolicyKind>,
    pub horizon: Option<u64>,
    pub warmup: Option<f64>,
    pub eps_start: Option<f64>,
    pub eps_floor: Option<f64>,
    pub eps_step: Option<f64>,
    pub lr_start: Option<f64>,
    pub lr_decay: Option<f64>,
    pub lr_floor: Option<f64>,
    pub mab_step: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub fc_ghz: Option<f64>,
    pub sigma_s: Option<f64>,
    pub d_corr: Option<f64>,
    pub min_sep: Option<f64>,
}

pub const CONFIG_KEYS: &[&str] = &[
    "K",
    "M",
    "p_act",
    "p_arr",
    "D",
    "slot_ms",
    "area",
    "r_sub",
    "v",
    "snr_db",
    "q",
    "S",
    "batch",
    "seed",
    "policy",
    "horizon",
    "warmup",
    "eps_start",
    "eps_floor",
    "eps_step",
    "lr_start",
    "lr_decay",
    "lr_floor",
    "mab_step",
    "alpha",
    "beta",
    "gamma",
    "fc_ghz",
    "sigma_s",
    "d_corr",
    "min_sep",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| format!("bad value '{value}' for {key}: {e}"))
}

impl PartialConfig {
    /// Parse `key = value` lines. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: format!("expected 'key = value', got '{line}'"),
            })?;
            cfg.set(key.trim(), value.trim())
                .map_err(|message| Error::Parse {
                    line: lineno + 1,
                    message,
                })?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "K" => self.k = Some(parse_value(key, value)?),
            "M" => self.m = Some(parse_value(key, value)?),
            "p_act" => self.p_act = Some(parse_value(key, value)?),
            "p_arr" => self.p_arr = Some(parse_value(key, value)?),
            "D" => self.deadline = Some(parse_value(key, value)?),
            "slot_ms" => self.slot_ms = Some(parse_value(key, value)?),
            "area" => self.area = Some(parse_value(key, value)?),
            "r_sub" => self.r_sub = Some(parse_value(key, value)?),
            "v" => self.speed = Some(parse_value(key, value)?),
            "snr_db" => self.snr_db = Some(parse_value(key, value)?),
            "q" => self.hidden = Some(parse_value(key, value)?),
            "S" => self.replay_capacity = Some(parse_value(key, value)?),
            "batch" => self.batch = Some(parse_value(key, value)?),
            "seed" => self.seed = Some(parse_value(key, value)?),
            "policy" => self.policy = Some(parse_value(key, value)?),
            "horizon" => self.horizon = Some(parse_value(key, value)?),
            "warmup" => self.warmup = Some(parse_value(key, value)?),
            "eps_start" => self.eps_start = Some(parse_value(key, value)?),
            "eps_floor" => self.eps_floor = Some(parse_value(key, value)?),
            "eps_step" => self.eps_step = Some(parse_value(key, value)?),
            "lr_start" => self.lr_start = Some(parse_value(key, value)?),
            "lr_decay" => self.lr_decay = Some(parse_value(key, value)?),
            "lr_floor" => self.lr_floor = Some(parse_value(key, value)?),
            "mab_step" => self.mab_step = Some(parse_value(key, value)?),
            "alpha" => self.alpha = Some(parse_value(key, value)?),
            "beta" => self.beta = Some(parse_value(key, value)?),
            "gamma" => self.gamma = Some(parse_value(key, value)?),
            "fc_ghz" => self.fc_ghz = Some(parse_value(key, value)?),
            "sigma_s" => self.sigma_s = Some(parse_value(key, value)?),
            "d_corr" => self.d_corr = Some(parse_value(key, value)?),
            "min_sep" => self.min_sep = Some(parse_value(key, value)?),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }
}

/// Fill defaults and check every constraint. Returns all violations at once.
pub fn validate_config(p: &PartialConfig) -> std::result::Result<SimConfig, Vec<Violation>> {
    let m = p.m.unwrap_or(3);
    let sched = Schedule::default();
    let prop = Propagation::default();
    // Mini-batch defaults to 30 samples per configuration; memory to ten batches.
    let batch = p
        .batch
        .unwrap_or_else(|| action_count(m.min(MAX_CHANNELS)) * 30);
    let cfg = SimConfig {
        k: p.k.unwrap_or(10),
        m,
        p_act: p.p_act.unwrap_or(0.4),
        p_arr: p.p_arr.unwrap_or(0.1),
        deadline: p.deadline.unwrap_or(20),
        slot_ms: p.slot_ms.unwrap_or(3.0),
        area: p.area.unwrap_or(Area::new(20.0, 20.0)),
        r_sub: p.r_sub.unwrap_or(2.0),
        speed: p.speed.unwrap_or(2.0),
        snr_db: p.snr_db.unwrap_or(140.0),
        hidden: p.hidden.unwrap_or(64),
        replay_capacity: p.replay_capacity.unwrap_or(batch.saturating_mul(10)),
        batch,
        seed: p.seed.unwrap_or(1),
        policy: p.policy.unwrap_or(PolicyKind::Dnn),
        horizon: p.horizon.unwrap_or(200_000),
        warmup: p.warmup.unwrap_or(0.1),
        schedule: Schedule {
            eps_start: p.eps_start.unwrap_or(sched.eps_start),
            eps_floor: p.eps_floor.unwrap_or(sched.eps_floor),
            eps_step: p.eps_step.unwrap_or(sched.eps_step),
            lr_start: p.lr_start.unwrap_or(sched.lr_start),
            lr_decay: p.lr_decay.unwrap_or(sched.lr_decay),
            lr_floor: p.lr_floor.unwrap_or(sched.lr_floor),
        },
        mab_step: p.mab_step.unwrap_or(0.1),
        propagation: Propagation {
            alpha: p.alpha.unwrap_or(prop.alpha),
            beta: p.beta.unwrap_or(prop.beta),
            gamma: p.gamma.unwrap_or(prop.gamma),
            fc_ghz: p.fc_ghz.unwrap_or(prop.fc_ghz),
            sigma_s: p.sigma_s.unwrap_or(prop.sigma_s),
            d_corr: p.d_corr.unwrap_or(prop.d_corr),
        },
        min_sep: p.min_sep.unwrap_or(1.5),
    };
    let v = violations(&cfg);
    if v.is_empty() {
        Ok(cfg)
    } else {
        Err(v)
    }
}

fn check_unit(v: &mut Vec<Violation>, key: &str, x: f64) {
    if !(0.0..=1.0).contains(&x) {
        v.push(Violation::new(key, format!("{key} ∉ [0,1] (got {x})")));
    }
}

fn check_positive(v: &mut Vec<Violation>, key: &str, x: f64) {
    if !(x > 0.0 && x.is_finite()) {
        v.push(Violation::new(key, format!("{key} must be > 0 (got {x})")));
    }
}

fn check_non_negative(v: &mut Vec<Violation>, key: &str, x: f64) {
    if !(x >= 0.0 && x.is_finite()) {
        v.push(Violation::new(key, format!("{key} must be ≥ 0 (got {x})")));
    }
}

fn violations(c: &SimConfig) -> Vec<Violation> {
    let mut v = Vec::new();
    if c.k == 0 {
        v.push(Violation::new("K", "K must be ≥ 1"));
    }
    if c.m == 0 || c.m > MAX_CHANNELS {
        v.push(Violation::new(
            "M",
            format!("M ∉ [1,{MAX_CHANNELS}] (got {})", c.m),
        ));
    }
    check_unit(&mut v, "p_act", c.p_act);
    check_unit(&mut v, "p_arr", c.p_arr);
    if c.deadline == 0 {
        v.push(Violation::new("D", "D must be ≥ 1"));
    }
    check_positive(&mut v, "slot_ms", c.slot_ms);
    check_positive(&mut v, "area", c.area.width.min(c.area.height));
    check_non_negative(&mut v, "r_sub", c.r_sub);
    check_non_negative(&mut v, "v", c.speed);
    if !c.snr_db.is_finite() {
        v.push(Violation::new("snr_db", "snr_db must be finite"));
    }
    if c.hidden == 0 {
        v.push(Violation::new("q", "q must be ≥ 1"));
    }
    if c.batch == 0 {
        v.push(Violation::new("batch", "batch must be ≥ 1"));
    }
    if c.batch > c.replay_capacity {
        v.push(Violation::new(
            "batch",
            format!(
                "batch ≤ S violated (batch = {}, S = {})",
                c.batch, c.replay_capacity
            ),
        ));
    }
    if c.horizon == 0 {
        v.push(Violation::new("horizon", "horizon must be ≥ 1"));
    }
    if !(0.0..1.0).contains(&c.warmup) {
        v.push(Violation::new(
            "warmup",
            format!("warmup ∉ [0,1) (got {})", c.warmup),
        ));
    }
    let s = &c.schedule;
    check_unit(&mut v, "eps_start", s.eps_start);
    check_unit(&mut v, "eps_floor", s.eps_floor);
    check_non_negative(&mut v, "eps_step", s.eps_step);
    if s.eps_floor > s.eps_start {
        v.push(Violation::new("eps_floor", "eps_floor must be ≤ eps_start"));
    }
    check_positive(&mut v, "lr_start", s.lr_start);
    if !(0.0..1.0).contains(&s.lr_decay) {
        v.push(Violation::new(
            "lr_decay",
            format!("lr_decay ∉ [0,1) (got {})", s.lr_decay),
        ));
    }
    check_non_negative(&mut v, "lr_floor", s.lr_floor);
    if !(c.mab_step > 0.0 && c.mab_step <= 1.0) {
        v.push(Violation::new(
            "mab_step",
            format!("mab_step ∉ (0,1] (got {})", c.mab_step),
        ));
    }
    let p = &c.propagation;
    for (key, x) in [("alpha", p.alpha), ("beta", p.beta), ("gamma", p.gamma)] {
        if !x.is_finite() {
            v.push(Violation::new(key, format!("{key} must be finite")));
        }
    }
    check_positive(&mut v, "fc_ghz", p.fc_ghz);
    check_non_negative(&mut v, "sigma_s", p.sigma_s);
    check_positive(&mut v, "d_corr", p.d_corr);
    check_non_negative(&mut v, "min_sep", c.min_sep);
    if let PolicyKind::Fixed(i) = c.policy {
        if c.m <= MAX_CHANNELS && i >= action_count(c.m) {
            v.push(Violation::new(
                "policy",
                format!("fixed policy index {i} ≥ 2^M"),
            ));
        }
    }
    // Rough packing bound for rejection-sampled placement.
    let packing = c.k as f64 * std::f64::consts::PI * c.min_sep * c.min_sep;
    if c.area.surface() > 0.0 && packing >= 4.0 * c.area.surface() {
        v.push(Violation::new(
            "K",
            format!(
                "K = {} subnetworks cannot be placed {} m apart in {} m²",
                c.k,
                c.min_sep,
                c.area.surface()
            ),
        ));
    }
    v
}

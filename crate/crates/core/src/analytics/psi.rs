use std::fmt;
use std::path::Path;

use rand::Rng;

use crate::access::{action_count, AccessConfig};
use crate::error::{Error, Result};

/// Row-sum tolerance.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Per-LAP distributions over the `2^M` access configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiMatrix {
    channels: usize,
    rows: Vec<Vec<f64>>,
}

impl PsiMatrix {
    pub fn new(rows: Vec<Vec<f64>>, channels: usize) -> Result<Self> {
        let width = action_count(channels);
        for (n, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(Error::DimensionMismatch {
                    expected: width,
                    actual: row.len(),
                });
            }
            if let Some(x) = row.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(Error::Domain(format!(
                    "psi[{n}] has entry {x} outside [0,1]"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::Domain(format!("psi[{n}] sums to {sum}, not 1")));
            }
        }
        Ok(Self { channels, rows })
    }

    /// Every LAP plays configuration `indices[n]` with certainty.
    pub fn deterministic(indices: &[usize], channels: usize) -> Result<Self> {
        let width = action_count(channels);
        let rows = indices
            .iter()
            .map(|&i| {
                if i >= width {
                    return Err(Error::IndexOutOfRange {
                        index: i,
                        channels,
                        limit: width,
                    });
                }
                let mut row = vec![0.0; width];
                row[i] = 1.0;
                Ok(row)
            })
            .collect::<Result<_>>()?;
        Self::new(rows, channels)
    }

    /// The random-channel-hopping distribution for every LAP.
    pub fn single_channel_uniform(laps: usize, channels: usize) -> Self {
        let mut row = vec![0.0; action_count(channels)];
        for m in 0..channels {
            row[1 << m] = 1.0 / channels as f64;
        }
        Self {
            channels,
            rows: vec![row; laps],
        }
    }

    /// Random rows drawn uniformly from the simplex.
    pub fn random<R: Rng + ?Sized>(laps: usize, channels: usize, rng: &mut R) -> Self {
        let width = action_count(channels);
        let rows = (0..laps)
            .map(|_| {
                let e: Vec<f64> = (0..width)
                    .map(|_| -(1.0 - rng.random::<f64>()).ln())
                    .collect();
                let s: f64 = e.iter().sum();
                e.iter().map(|x| x / s).collect()
            })
            .collect();
        Self { channels, rows }
    }

    /// CSV text, one row per LAP and `2^M` columns. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse_csv(text: &str, channels: usize) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record?;
            let row = record
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|e| Error::Parse {
                        line: line + 1,
                        message: format!("{f:?}: {e}"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::new(rows, channels)
    }

    pub fn from_csv_file(path: impl AsRef<Path>, channels: usize) -> Result<Self> {
        Self::parse_csv(&std::fs::read_to_string(path)?, channels)
    }

    pub fn laps(&self) -> usize {
        self.rows.len()
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn actions(&self) -> usize {
        action_count(self.channels)
    }

    pub fn row(&self, n: usize) -> &[f64] {
        &self.rows[n]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Draw a configuration for LAP `n`.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> AccessConfig {
        let u: f64 = rng.random();
        let row = &self.rows[n];
        let mut acc = 0.0;
        let mut pick = row.iter().rposition(|&x| x > 0.0).unwrap_or(0);
        for (i, &x) in row.iter().enumerate() {
            acc += x;
            if u < acc {
                pick = i;
                break;
            }
        }
        AccessConfig::from_index(pick, self.channels).expect("row width is 2^M")
    }

    /// The configuration LAP `n` plays if its row is deterministic.
    pub fn deterministic_choice(&self, n: usize) -> Option<AccessConfig> {
        let i = self.rows[n].iter().position(|&x| x == 1.0)?;
        AccessConfig::from_index(i, self.channels).ok()
    }
}

impl fmt::Display for PsiMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

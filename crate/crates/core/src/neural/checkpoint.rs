//! Text checkpoint of network weights.
//!
//! ```text
//! csra-mlp v1
//! channels <M> hidden <q>
//! layer <outputs> <inputs>
//! <outputs lines of <inputs> weights>
//! <one line of <outputs> biases>
//! ... (three layers)
//! ```
//! Floats use Rust's shortest round-trip formatting, so a save/load cycle is
//! exact.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{Dense, Mlp};
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &str = "csra-mlp v1";

pub fn to_checkpoint_string(net: &Mlp, channels: usize) -> String {
    let mut s = String::new();
    writeln!(s, "{CHECKPOINT_MAGIC}").unwrap();
    writeln!(s, "channels {channels} hidden {}", net.hidden()).unwrap();
    for l in &net.layers {
        writeln!(s, "layer {} {}", l.outputs(), l.inputs()).unwrap();
        for row in l.weight.rows() {
            let line: Vec<String> = row.iter().map(f64::to_string).collect();
            writeln!(s, "{}", line.join(" ")).unwrap();
        }
        let line: Vec<String> = l.bias.iter().map(f64::to_string).collect();
        writeln!(s, "{}", line.join(" ")).unwrap();
    }
    s
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

fn floats(line: Option<&str>, n: usize) -> Result<Vec<f64>> {
    let line = line.ok_or_else(|| bad("unexpected end of file"))?;
    let v = line
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| bad(format!("bad number '{t}': {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if v.len() != n {
        return Err(bad(format!("expected {n} values, found {}", v.len())));
    }
    Ok(v)
}

/// Parse a checkpoint; returns the network and its channel count.
pub fn from_checkpoint_str(text: &str) -> Result<(Mlp, usize)> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CHECKPOINT_MAGIC) {
        return Err(bad(format!("missing '{CHECKPOINT_MAGIC}' header")));
    }
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| bad("missing shape header"))?
        .split_whitespace()
        .collect();
    let (channels, hidden) = match header.as_slice() {
        ["channels", m, "hidden", q] => (
            m.parse::<usize>().map_err(|e| bad(e.to_string()))?,
            q.parse::<usize>().map_err(|e| bad(e.to_string()))?,
        ),
        _ => return Err(bad("malformed shape header")),
    };
    let expected = [
        (hidden, 2 * channels),
        (hidden, hidden),
        (1usize << channels, hidden),
    ];
    let mut layers = Vec::with_capacity(3);
    for (outs, ins) in expected {
        let shape: Vec<&str> = lines
            .next()
            .ok_or_else(|| bad("missing layer header"))?
            .split_whitespace()
            .collect();
        if shape != ["layer", &outs.to_string(), &ins.to_string()] {
            return Err(bad(format!(
                "layer header {shape:?} does not match expected {outs}x{ins}"
            )));
        }
        let mut w = Vec::with_capacity(outs * ins);
        for _ in 0..outs {
            w.extend(floats(lines.next(), ins)?);
        }
        let b = floats(lines.next(), outs)?;
        layers.push(Dense {
            weight: Array2::from_shape_vec((outs, ins), w).map_err(|e| bad(e.to_string()))?,
            bias: Array1::from_vec(b),
        });
    }
    let layers: [Dense; 3] = layers.try_into().expect("three layers");
    Ok((Mlp { layers }, channels))
}

pub fn save_checkpoint(net: &Mlp, channels: usize, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_checkpoint_string(net, channels))?;
    Ok(())
}

pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<(Mlp, usize)> {
    from_checkpoint_str(&std::fs::read_to_string(path)?)
}

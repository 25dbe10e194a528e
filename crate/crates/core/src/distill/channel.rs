use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classical channel `x ↦ (u, v)` with `q(u, v | x)`; `u` is kept for the
/// key and `v` is announced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelJson", into = "ChannelJson")]
pub struct PreprocessChannel {
    name: String,
    u_size: usize,
    v_size: usize,
    /// `rows[x][u * v_size + v]`.
    rows: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    name: String,
    u_size: usize,
    v_size: usize,
    rows: Vec<Vec<f64>>,
}

impl TryFrom<ChannelJson> for PreprocessChannel {
    type Error = Error;
    fn try_from(j: ChannelJson) -> Result<Self> {
        PreprocessChannel::new(&j.name, j.u_size, j.v_size, j.rows)
    }
}

impl From<PreprocessChannel> for ChannelJson {
    fn from(c: PreprocessChannel) -> Self {
        ChannelJson {
            name: c.name,
            u_size: c.u_size,
            v_size: c.v_size,
            rows: c.rows,
        }
    }
}

const ROW_TOL: f64 = 1e-10;

impl PreprocessChannel {
    pub fn new(name: &str, u_size: usize, v_size: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        if u_size == 0 || v_size == 0 || rows.is_empty() {
            return Err(Error::InvalidArgument("channel alphabets must be nonempty".into()));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != u_size * v_size {
                return Err(Error::invariant(
                    "one probability per (u, v)",
                    format!("row {x} has {} entries, expected {}", row.len(), u_size * v_size),
                ));
            }
            if row.iter().any(|q| !(q.is_finite() && *q >= 0.0)) {
                return Err(Error::invariant("probabilities nonnegative", format!("row {x}")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::invariant("rows sum to 1", format!("row {x} sums to {s}")));
            }
        }
        Ok(PreprocessChannel {
            name: name.to_string(),
            u_size,
            v_size,
            rows,
        })
    }

    /// `u = x`, nothing announced.
    pub fn identity(nx: usize) -> Self {
        let rows = (0..nx)
            .map(|x| (0..nx).map(|u| if u == x { 1.0 } else { 0.0 }).collect())
            .collect();
        PreprocessChannel::new("identity", nx, 1, rows).expect("valid by construction")
    }

    /// `u = 0` for every `x`.
    pub fn constant(nx: usize) -> Self {
        PreprocessChannel::new("constant", 1, 1, vec![vec![1.0]; nx]).expect("valid by construction")
    }

    /// `u = x` with probability `1 − p`, otherwise uniform noise on the
    /// alphabet; nothing announced.
    pub fn noisy(nx: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("noise must lie in [0, 1], got {p}")));
        }
        let rows = (0..nx)
            .map(|x| {
                (0..nx)
                    .map(|u| p / nx as f64 + if u == x { 1.0 - p } else { 0.0 })
                    .collect()
            })
            .collect();
        PreprocessChannel::new(&format!("noisy({p})"), nx, 1, rows)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn input_size(&self) -> usize {
        self.rows.len()
    }

    pub fn u_size(&self) -> usize {
        self.u_size
    }

    pub fn v_size(&self) -> usize {
        self.v_size
    }

    /// `q(u, v | x)`; zero for symbols outside the input alphabet.
    pub fn prob(&self, x: usize, u: usize, v: usize) -> f64 {
        self.rows
            .get(x)
            .map_or(0.0, |row| row[u * self.v_size + v])
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn list_from_json(s: &str) -> Result<Vec<Self>> {
        Ok(serde_json::from_str(s)?)
    }
}

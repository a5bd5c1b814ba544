//! Probability tables `P(a, b, c | x, z)` and their JSON record format.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::BsmOutcome;

/// Per-block normalization tolerance for measured tables.
pub const EXPERIMENTAL_NORM_TOL: f64 = 1e-4;
/// Per-block normalization tolerance for model-generated tables.
pub const MODEL_NORM_TOL: f64 = 1e-10;

const ENTRIES: usize = 48;

/// One cell `(x, z, b, a, c)` of a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OutcomeKey {
    pub x: u8,
    pub z: u8,
    pub b: BsmOutcome,
    pub a: u8,
    pub c: u8,
}

impl OutcomeKey {
    pub fn new(x: u8, z: u8, b: BsmOutcome, a: u8, c: u8) -> Result<Self> {
        for (name, bit) in [("x", x), ("z", z), ("a", a), ("c", c)] {
            if bit > 1 {
                return Err(Error::InvalidTable(format!("{name} = {bit} is not a bit")));
            }
        }
        Ok(Self { x, z, b, a, c })
    }

    fn index(&self) -> usize {
        ((self.x as usize * 2 + self.z as usize) * 3 + self.b.index()) * 4
            + self.a as usize * 2
            + self.c as usize
    }

    /// All 48 keys in `(x, z, b, a, c)` lexicographic order.
    pub fn all() -> impl Iterator<Item = OutcomeKey> {
        settings().flat_map(|(x, z)| block_keys(x, z))
    }
}

/// The four setting blocks `(x, z)`.
pub fn settings() -> impl Iterator<Item = (u8, u8)> {
    [(0, 0), (0, 1), (1, 0), (1, 1)].into_iter()
}

/// The 12 outcome keys of block `(x, z)`.
pub fn block_keys(x: u8, z: u8) -> impl Iterator<Item = OutcomeKey> {
    BsmOutcome::ALL.into_iter().flat_map(move |b| {
        [(0, 0), (0, 1), (1, 0), (1, 1)]
            .into_iter()
            .map(move |(a, c)| OutcomeKey { x, z, b, a, c })
    })
}

/// Serialized table cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRecord {
    pub x: u8,
    pub z: u8,
    pub b: BsmOutcome,
    pub a: u8,
    pub c: u8,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

/// Map `(x, z, b, a, c) → probability` with optional one-sigma errors.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    probs: [Option<f64>; ENTRIES],
    sigmas: [Option<f64>; ENTRIES],
}

impl Default for ProbabilityTable {
    fn default() -> Self {
        Self::new()
    }
}

impl ProbabilityTable {
    pub fn new() -> Self {
        Self {
            probs: [None; ENTRIES],
            sigmas: [None; ENTRIES],
        }
    }

    pub fn set(&mut self, key: OutcomeKey, p: f64) -> Result<()> {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidTable(format!("probability {p} at {key:?}")));
        }
        self.probs[key.index()] = Some(p);
        Ok(())
    }

    pub fn set_sigma(&mut self, key: OutcomeKey, sigma: f64) -> Result<()> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidTable(format!("sigma {sigma} at {key:?}")));
        }
        self.sigmas[key.index()] = Some(sigma);
        Ok(())
    }

    pub fn get(&self, key: OutcomeKey) -> Result<f64> {
        self.probs[key.index()].ok_or(Error::MissingEntry {
            x: key.x,
            z: key.z,
            b: key.b.label(),
            a: key.a,
            c: key.c,
        })
    }

    pub fn sigma(&self, key: OutcomeKey) -> Option<f64> {
        self.sigmas[key.index()]
    }

    pub fn is_complete(&self) -> bool {
        self.probs.iter().all(Option::is_some)
    }

    /// True when every present entry carries a sigma.
    pub fn has_sigmas(&self) -> bool {
        self.probs
            .iter()
            .zip(&self.sigmas)
            .any(|(p, s)| p.is_some() && s.is_some())
            && self
                .probs
                .iter()
                .zip(&self.sigmas)
                .all(|(p, s)| p.is_none() || s.is_some())
    }

    /// Sum of the present entries of block `(x, z)`.
    pub fn block_sum(&self, x: u8, z: u8) -> f64 {
        block_keys(x, z).filter_map(|k| self.probs[k.index()]).sum()
    }

    /// Blocks whose total deviates from 1 by more than `tol`, as `(x, z, sum)`.
    pub fn normalization_violations(&self, tol: f64) -> Vec<(u8, u8, f64)> {
        settings()
            .map(|(x, z)| (x, z, self.block_sum(x, z)))
            .filter(|&(_, _, s)| (s - 1.0).abs() > tol)
            .collect()
    }

    pub fn from_records(records: &[TableRecord]) -> Result<Self> {
        let mut t = Self::new();
        for r in records {
            let key = OutcomeKey::new(r.x, r.z, r.b, r.a, r.c)?;
            if t.probs[key.index()].is_some() {
                return Err(Error::InvalidTable(format!("duplicate entry {key:?}")));
            }
            t.set(key, r.p)?;
            if let Some(s) = r.sigma {
                t.set_sigma(key, s)?;
            }
        }
        Ok(t)
    }

    pub fn to_records(&self) -> Vec<TableRecord> {
        OutcomeKey::all()
            .filter_map(|k| {
                self.probs[k.index()].map(|p| TableRecord {
                    x: k.x,
                    z: k.z,
                    b: k.b,
                    a: k.a,
                    c: k.c,
                    p,
                    sigma: self.sigmas[k.index()],
                })
            })
            .collect()
    }

    /// Parses a JSON array of `{x, z, b, a, c, p, sigma}` records.
    pub fn from_json(text: &str) -> Result<Self> {
        let records: Vec<TableRecord> = serde_json::from_str(text)?;
        Self::from_records(&records)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_records()).expect("records serialize")
    }
}

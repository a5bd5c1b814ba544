//! Space-like separation audit.
//!
//! Each condition requires `L / c > max_i (t + τ_i)`: the beeline distance
//! between two events, travelled at the vacuum speed of light, must exceed
//! the relative delay plus the slowest elapse time. Fibre lengths are kept as
//! metadata only; they never enter a margin.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCondition {
    pub label: String,
    pub distance_m: f64,
    pub relative_delay_ns: f64,
    pub elapses_ns: Vec<f64>,
    /// Margin quoted alongside the inputs, when the source lists one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reported_margin_ns: Option<f64>,
}

impl SeparationCondition {
    pub fn new(
        label: impl Into<String>,
        distance_m: f64,
        relative_delay_ns: f64,
        elapses_ns: Vec<f64>,
    ) -> Result<Self> {
        let c = Self {
            label: label.into(),
            distance_m,
            relative_delay_ns,
            elapses_ns,
            reported_margin_ns: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.distance_m.is_finite() || self.distance_m <= 0.0 {
            return Err(Error::InvalidGeometry(format!(
                "{}: distance {} m must be positive",
                self.label, self.distance_m
            )));
        }
        if !self.relative_delay_ns.is_finite() {
            return Err(Error::InvalidGeometry(format!("{}: non-finite delay", self.label)));
        }
        if self.elapses_ns.is_empty() {
            return Err(Error::InvalidGeometry(format!("{}: no elapse times", self.label)));
        }
        if self.elapses_ns.iter().any(|&t| !t.is_finite() || t < 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "{}: elapse times must be non-negative",
                self.label
            )));
        }
        Ok(())
    }

    /// Light travel time over the beeline distance, in ns.
    pub fn light_time_ns(&self) -> f64 {
        self.distance_m / SPEED_OF_LIGHT * 1e9
    }
}

/// `L/c − max_i(t + τ_i)` in nanoseconds; positive means space-like.
pub fn margin(c: &SeparationCondition) -> f64 {
    let latest = c
        .elapses_ns
        .iter()
        .map(|tau| c.relative_delay_ns + tau)
        .fold(f64::NEG_INFINITY, f64::max);
    c.light_time_ns() - latest
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionMargin {
    pub label: String,
    pub margin_ns: f64,
    pub satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reported_margin_ns: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CausalityReport {
    pub conditions: Vec<ConditionMargin>,
    pub all_satisfied: bool,
}

impl CausalityReport {
    /// Aligned-column text rendering.
    pub fn to_text(&self) -> String {
        let width = self
            .conditions
            .iter()
            .map(|c| c.label.chars().count())
            .max()
            .unwrap_or(0)
            .max("condition".len());
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>12}  {:>12}  status",
            "condition", "margin_ns", "reported_ns"
        );
        for c in &self.conditions {
            let reported = c
                .reported_margin_ns
                .map_or_else(|| "-".to_string(), |r| format!("{r:.2}"));
            let _ = writeln!(
                out,
                "{:<width$}  {:>12.2}  {:>12}  {}",
                c.label,
                c.margin_ns,
                reported,
                if c.satisfied { "space-like" } else { "VIOLATED" }
            );
        }
        let _ = writeln!(
            out,
            "overall: {}",
            if self.all_satisfied { "all conditions satisfied" } else { "violated" }
        );
        out
    }
}

pub fn audit(conditions: &[SeparationCondition]) -> Result<CausalityReport> {
    if conditions.is_empty() {
        return Err(Error::InvalidGeometry("no conditions to audit".into()));
    }
    let mut rows = Vec::with_capacity(conditions.len());
    for c in conditions {
        c.validate()?;
        let m = margin(c);
        rows.push(ConditionMargin {
            label: c.label.clone(),
            margin_ns: m,
            satisfied: m > 0.0,
            reported_margin_ns: c.reported_margin_ns,
        });
    }
    let all_satisfied = rows.iter().all(|r| r.satisfied);
    Ok(CausalityReport {
        conditions: rows,
        all_satisfied,
    })
}

/// Parsed geometry document.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Geometry {
    pub conditions: Vec<SeparationCondition>,
    pub fibre_lengths_m: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct RawGeometry {
    conditions: Vec<RawCondition>,
    #[serde(default)]
    fibre_lengths_m: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
struct RawCondition {
    label: Option<String>,
    distance_m: Option<f64>,
    relative_delay_ns: Option<f64>,
    elapses_ns: Option<Vec<f64>>,
    reported_margin_ns: Option<f64>,
}

/// Parses `{conditions: [{label, distance_m, relative_delay_ns, elapses_ns}],
/// fibre_lengths_m: {link: metres}}`.
pub fn load_geometry(text: &str) -> Result<Geometry> {
    let raw: RawGeometry = serde_json::from_str(text)?;
    let mut conditions = Vec::with_capacity(raw.conditions.len());
    for (i, rc) in raw.conditions.into_iter().enumerate() {
        let label = rc.label.unwrap_or_else(|| format!("condition #{}", i + 1));
        let missing = |field: &str| Error::InvalidGeometry(format!("{label}: missing {field}"));
        let cond = SeparationCondition {
            distance_m: rc.distance_m.ok_or_else(|| missing("distance_m"))?,
            relative_delay_ns: rc.relative_delay_ns.ok_or_else(|| missing("relative_delay_ns"))?,
            elapses_ns: rc.elapses_ns.ok_or_else(|| missing("elapses_ns"))?,
            reported_margin_ns: rc.reported_margin_ns,
            label,
        };
        cond.validate()?;
        conditions.push(cond);
    }
    for (link, &len) in &raw.fibre_lengths_m {
        if !len.is_finite() || len <= 0.0 {
            return Err(Error::InvalidGeometry(format!("fibre {link}: length {len} m")));
        }
    }
    Ok(Geometry {
        conditions,
        fibre_lengths_m: raw.fibre_lengths_m,
    })
}

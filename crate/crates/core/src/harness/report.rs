//! Sweep reports: a stable JSON schema plus a CSV flattening.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::THRESHOLDS;
use super::family::GENERATOR_ID;
use crate::error::Result;

/// Operator norms are estimated by maximizing over a family, which only
/// bounds the true norm from below.
pub const STATISTIC_LABEL: &str = "empirical_lower_bound";

pub const TOOL_VERSION: &str = concat!("cube-harmonics ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemberRow {
    pub member: String,
    pub statistic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerN {
    pub n: usize,
    pub statistic: f64,
    /// Where the statistic was attained, plus any per-`n` side values.
    pub argmax: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<MemberRow>,
}

impl PerN {
    pub fn new(n: usize, statistic: f64) -> Self {
        Self {
            n,
            statistic,
            argmax: BTreeMap::new(),
            members: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.argmax.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub campaign: String,
    pub statistic_label: String,
    pub generator: String,
    pub n_values: Vec<usize>,
    pub m: Option<usize>,
    pub parameters: BTreeMap<String, Value>,
    pub per_n: Vec<PerN>,
    pub estimated_constant: f64,
    pub diagnostics: BTreeMap<String, f64>,
    pub family_seed: u64,
    pub tolerance_profile: BTreeMap<String, f64>,
    /// Threshold violations; empty when the campaign passed.
    pub failures: Vec<String>,
    pub tool_version: String,
}

impl SweepReport {
    pub fn new(campaign: &str, family_seed: u64, per_n: Vec<PerN>) -> Self {
        let estimated_constant = per_n.iter().map(|row| row.statistic).fold(f64::NEG_INFINITY, f64::max);
        Self {
            campaign: campaign.to_string(),
            statistic_label: STATISTIC_LABEL.to_string(),
            generator: GENERATOR_ID.to_string(),
            n_values: per_n.iter().map(|row| row.n).collect(),
            m: None,
            parameters: BTreeMap::new(),
            per_n,
            estimated_constant,
            diagnostics: BTreeMap::new(),
            family_seed,
            tolerance_profile: THRESHOLDS.profile(),
            failures: Vec::new(),
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// One row per `(n, member)`; campaigns without members give one row
    /// per `n` with an empty member column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("campaign,n,member,statistic\n");
        for row in &self.per_n {
            if row.members.is_empty() {
                let _ = writeln!(out, "{},{},,{:e}", self.campaign, row.n, row.statistic);
            }
            for member in &row.members {
                let _ = writeln!(out, "{},{},{},{:e}", self.campaign, row.n, member.member, member.statistic);
            }
        }
        out
    }

    /// The statistics in grid order.
    pub fn series(&self) -> Vec<f64> {
        self.per_n.iter().map(|row| row.statistic).collect()
    }
}

/// Ratios `s[i+1] / s[i]` above `limit`, as failure messages.
pub(crate) fn growth_failures(label: &str, n_values: &[usize], series: &[f64], limit: f64) -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..series.len() {
        let (prev, next) = (series[i - 1], series[i]);
        if !next.is_finite() || (prev > 0.0 && next / prev > limit) || (prev == 0.0 && next > 0.0) {
            out.push(format!(
                "{label}: {next:.6} at n={} vs {prev:.6} at n={} exceeds growth limit {limit}",
                n_values[i],
                n_values[i - 1]
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json() {
        let mut row = PerN::new(8, 1.5).with("argmax_r", 4);
        row.members.push(MemberRow {
            member: "delta".into(),
            statistic: 1.5,
        });
        row.members.push(MemberRow {
            member: "random_uniform".into(),
            statistic: 1.25,
        });
        let report = SweepReport::new("ratio_sweep", 7, vec![row, PerN::new(10, 2.0)]);
        assert_eq!(report.estimated_constant, 2.0);
        assert_eq!(report.n_values, vec![8, 10]);
        let csv = report.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "campaign,n,member,statistic");
        assert_eq!(lines[1], "ratio_sweep,8,delta,1.5e0");
        assert_eq!(lines[3], "ratio_sweep,10,,2e0");
        let json = report.to_json().unwrap();
        assert!(json.contains("\"statistic_label\": \"empirical_lower_bound\""));
        assert_eq!(SweepReport::from_json(&json).unwrap(), report);
    }

    #[test]
    fn json_floats_round_trip_exactly() {
        // The default serde_json float parser is off by one ulp here.
        let report = SweepReport::new("x", 0, vec![PerN::new(12, 1.2776599326958975)]);
        let back = SweepReport::from_json(&report.to_json().unwrap()).unwrap();
        assert_eq!(back.per_n[0].statistic.to_bits(), 1.2776599326958975f64.to_bits());
    }

    #[test]
    fn growth_flags() {
        let n = [8, 12, 16];
        assert!(growth_failures("x", &n, &[1.0, 1.09, 1.0], 1.10).is_empty());
        assert_eq!(growth_failures("x", &n, &[1.0, 1.2, 1.3], 1.10).len(), 1);
        assert_eq!(growth_failures("x", &n, &[0.0, 1.0, f64::INFINITY], 1.10).len(), 2);
    }
}

use std::fmt::Write as _;

use serde::{Serialize, Serializer};

use super::config::ExperimentConfig;

fn finite_or_null<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(x) if x.is_finite() => s.serialize_f64(*x),
        _ => s.serialize_none(),
    }
}

/// Outcome at one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TradeoffRow {
    pub m: usize,
    pub ratio: f64,
    #[serde(serialize_with = "finite_or_null")]
    pub utility_accuracy_mean: Option<f64>,
    #[serde(serialize_with = "finite_or_null")]
    pub utility_accuracy_std: Option<f64>,
    #[serde(serialize_with = "finite_or_null")]
    pub leakage_relative_l2_median: Option<f64>,
    /// `null` in JSON when the median is infinite (exact reconstructions).
    #[serde(serialize_with = "finite_or_null")]
    pub leakage_psnr_median: Option<f64>,
    pub attack_used: Option<String>,
    #[serde(serialize_with = "finite_or_null")]
    pub wall_time_s: Option<f64>,
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TradeoffReport {
    pub toolkit_version: String,
    pub config: ExperimentConfig,
    pub rows: Vec<TradeoffRow>,
}

impl TradeoffReport {
    /// Pretty JSON with keys in declaration order, newline-terminated.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "m,ratio,utility_accuracy_mean,utility_accuracy_std,leakage_relative_l2_median,leakage_psnr_median,attack_used,wall_time_s,skipped\n",
        );
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.m,
                r.ratio,
                opt(r.utility_accuracy_mean),
                opt(r.utility_accuracy_std),
                opt(r.leakage_relative_l2_median),
                opt(r.leakage_psnr_median),
                quote(r.attack_used.as_deref().unwrap_or("")),
                opt(r.wall_time_s),
                quote(r.skipped.as_deref().unwrap_or("")),
            )
            .expect("string write");
        }
        out
    }

    /// Smallest swept `m` whose mean accuracy reaches `target`.
    pub fn min_components(&self, target: f64) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.utility_accuracy_mean.is_some_and(|u| u >= target))
            .map(|r| r.m)
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

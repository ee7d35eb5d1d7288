use std::collections::BTreeMap;
use std::time::Duration;

use majcert_core::majcert::DecompositionDoc;
use majcert_core::quantum::ProtocolDoc;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ExperimentConfig;

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Round to 12 significant digits so reports diff cleanly.
pub fn sig12(v: f64) -> f64 {
    if !v.is_finite() || v == 0.0 {
        return v;
    }
    format!("{v:.11e}").parse().unwrap_or(v)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub index: usize,
    pub seed: u64,
    pub inputs_digest: String,
    pub verified: bool,
    pub measurements: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolDoc>,
}

impl Record {
    pub fn new(index: usize, seed: u64) -> Self {
        Self {
            index,
            seed,
            ..Self::default()
        }
    }

    pub fn num(&mut self, key: &str, v: f64) -> &mut Self {
        self.measurements.insert(key.into(), Value::from(sig12(v)));
        self
    }

    pub fn int(&mut self, key: &str, v: usize) -> &mut Self {
        self.measurements.insert(key.into(), Value::from(v as u64));
        self
    }

    pub fn flag(&mut self, key: &str, v: bool) -> &mut Self {
        self.measurements.insert(key.into(), Value::from(v));
        self
    }

    pub fn text(&mut self, key: &str, v: impl Into<String>) -> &mut Self {
        self.measurements.insert(key.into(), Value::from(v.into()));
        self
    }

    pub fn lines<T: ToString>(&mut self, key: &str, items: &[T]) -> &mut Self {
        self.measurements
            .insert(key.into(), Value::from(items.iter().map(T::to_string).collect::<Vec<_>>()));
        self
    }

    pub fn nums(&mut self, key: &str, vs: &[f64]) -> &mut Self {
        self.measurements
            .insert(key.into(), Value::from(vs.iter().map(|&v| sig12(v)).collect::<Vec<_>>()));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub instances: usize,
    pub verified: usize,
    pub failed: usize,
    pub errors: usize,
}

impl Summary {
    pub fn of(records: &[Record]) -> Self {
        let verified = records.iter().filter(|r| r.verified).count();
        Self {
            instances: records.len(),
            verified,
            failed: records.len() - verified,
            errors: records.iter().filter(|r| r.error.is_some()).count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: u32,
    pub artifact_version: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub records: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub fn all_verified(&self) -> bool {
        self.summary.failed == 0 && self.records.iter().all(|r| r.verified)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Per-instance wall-clock times; kept out of the JSON report so that
/// reports stay byte-identical across runs.
#[derive(Clone, Debug, Default)]
pub struct Timings(pub Vec<Duration>);

/// One CSV row per record: index, verdict, elapsed time, then every scalar
/// measurement in key order.
pub fn write_csv(report: &Report, timings: &Timings, path: &std::path::Path) -> anyhow::Result<()> {
    let mut keys: Vec<&String> = Vec::new();
    for r in &report.records {
        for (k, v) in &r.measurements {
            if !v.is_array() && !keys.contains(&k) {
                keys.push(k);
            }
        }
    }
    keys.sort();
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["index".to_string(), "verified".into(), "elapsed_ms".into()];
    header.extend(keys.iter().map(|k| k.to_string()));
    w.write_record(&header)?;
    for (i, r) in report.records.iter().enumerate() {
        let elapsed = timings.0.get(i).map_or(String::new(), |d| format!("{:.3}", d.as_secs_f64() * 1e3));
        let mut row = vec![r.index.to_string(), r.verified.to_string(), elapsed];
        for k in &keys {
            row.push(match r.measurements.get(*k) {
                Some(Value::String(s)) => s.clone(),
                Some(v) => v.to_string(),
                None => String::new(),
            });
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(sig12(0.1 + 0.2), 0.3);
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(123456789.123456), 123456789.123);
    }

    #[test]
    fn summary_counts_match() {
        let mut a = Record::new(0, 1);
        a.verified = true;
        let mut b = Record::new(1, 2);
        b.error = Some("cap".into());
        let s = Summary::of(&[a, b]);
        assert_eq!((s.instances, s.verified, s.failed, s.errors), (2, 1, 1, 1));
    }
}

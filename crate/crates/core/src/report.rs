//! Run manifests and deterministic report serialization.
//!
//! Reports are JSON with sorted keys (or a flat CSV table) and must be
//! byte-stable across identical runs: no wall-clock data unless explicitly
//! stamped, and only ordered containers anywhere near serialization.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::BTreeMap;

/// Verdict vocabulary for checks carried in a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
    Saturated,
}

/// One named check with its measured value and threshold.
#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckEntry {
    pub fn measured(name: &str, value: f64, threshold: f64, pass: bool) -> Self {
        CheckEntry {
            name: name.into(),
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            value: Some(value),
            threshold: Some(threshold),
            note: None,
        }
    }

    pub fn flagged(name: &str, verdict: Verdict, note: impl Into<String>) -> Self {
        CheckEntry {
            name: name.into(),
            verdict,
            value: None,
            threshold: None,
            note: Some(note.into()),
        }
    }
}

/// Everything one run reports: configuration echo, verdicts, numbers.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub artifact_version: String,
    /// Populated only when explicitly stamped; reports stay byte-identical
    /// across reruns otherwise.
    pub timestamp: Option<String>,
    pub command: String,
    pub config_echo: serde_json::Value,
    pub checks: Vec<CheckEntry>,
    pub results: BTreeMap<String, serde_json::Value>,
}

impl RunManifest {
    pub fn new(command: &str, config_echo: serde_json::Value) -> Self {
        RunManifest {
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: None,
            command: command.into(),
            config_echo,
            checks: Vec::new(),
            results: BTreeMap::new(),
        }
    }

    pub fn stamp(&mut self, timestamp: String) {
        self.timestamp = Some(timestamp);
    }

    pub fn push_check(&mut self, entry: CheckEntry) {
        self.checks.push(entry);
    }

    pub fn insert_result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(
            key.into(),
            serde_json::to_value(value).expect("result serializable"),
        );
    }

    pub fn all_pass(&self) -> bool {
        self.checks
            .iter()
            .all(|c| matches!(c.verdict, Verdict::Pass | Verdict::Skipped))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Serialize a manifest deterministically. JSON goes through
/// `serde_json::Value`, whose map type keeps keys sorted; CSV is a flat
/// name,value,verdict table of the checks followed by the scalar results.
pub fn emit_report(manifest: &RunManifest, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let value = serde_json::to_value(manifest).map_err(|e| Error::InvalidParameter {
                what: "manifest",
                why: e.to_string(),
            })?;
            let mut bytes = serde_json::to_vec_pretty(&value).map_err(|e| Error::InvalidParameter {
                what: "manifest",
                why: e.to_string(),
            })?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        ReportFormat::Csv => {
            let mut out = String::from("kind,name,value,verdict\n");
            for c in &manifest.checks {
                let value = c.value.map(|v| format!("{v:.16e}")).unwrap_or_default();
                let verdict = serde_json::to_string(&c.verdict).expect("verdict serializes");
                out.push_str(&format!(
                    "check,{},{},{}\n",
                    c.name,
                    value,
                    verdict.trim_matches('"')
                ));
            }
            for (k, v) in &manifest.results {
                if let Some(x) = v.as_f64() {
                    out.push_str(&format!("result,{k},{x:.16e},\n"));
                }
            }
            Ok(out.into_bytes())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> RunManifest {
        let mut m = RunManifest::new("solve", serde_json::json!({"p": 1.5, "a_inf": 1.0}));
        m.push_check(CheckEntry::measured("bound", 1.95, 6.28, true));
        m.insert_result("energy", 1.95);
        m.insert_result("iterations", 2423);
        m
    }

    #[test]
    fn identical_manifests_emit_identical_bytes() {
        let a = emit_report(&sample(), ReportFormat::Json).unwrap();
        let b = emit_report(&sample(), ReportFormat::Json).unwrap();
        assert_eq!(a, b);
        let c = emit_report(&sample(), ReportFormat::Csv).unwrap();
        let d = emit_report(&sample(), ReportFormat::Csv).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn json_keys_are_sorted() {
        let bytes = emit_report(&sample(), ReportFormat::Json).unwrap();
        let text = String::from_utf8(bytes).unwrap();
        let artifact = text.find("\"artifact_version\"").unwrap();
        let checks = text.find("\"checks\"").unwrap();
        let command = text.find("\"command\"").unwrap();
        let results = text.find("\"results\"").unwrap();
        assert!(artifact < checks && checks < command && command < results);
    }

    #[test]
    fn verdict_vocabulary_is_fixed() {
        for (v, s) in [
            (Verdict::Pass, "\"pass\""),
            (Verdict::Fail, "\"fail\""),
            (Verdict::Skipped, "\"skipped\""),
            (Verdict::Saturated, "\"saturated\""),
        ] {
            assert_eq!(serde_json::to_string(&v).unwrap(), s);
        }
    }

    #[test]
    fn all_pass_ignores_skips_but_not_failures() {
        let mut m = sample();
        assert!(m.all_pass());
        m.push_check(CheckEntry::flagged("extra", Verdict::Skipped, "not run"));
        assert!(m.all_pass());
        m.push_check(CheckEntry::measured("broken", 2.0, 1.0, false));
        assert!(!m.all_pass());
    }
}

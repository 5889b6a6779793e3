use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Outcome of one named check. `pass` is `max_error <= tolerance`; a NaN error never passes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub metadata: BTreeMap<String, Value>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, max_error: f64, tolerance: f64) -> Self {
        Self {
            check: check.into(),
            max_error,
            tolerance,
            pass: max_error <= tolerance,
            metadata: BTreeMap::new(),
        }
    }

    /// A check that is decided by a boolean (an audit) rather than a measured error.
    pub fn audit(check: impl Into<String>, ok: bool) -> Self {
        Self::new(check, if ok { 0.0 } else { 1.0 }, 0.5)
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn insert(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub reports: Vec<VerificationReport>,
}

impl ReportBundle {
    pub fn new(reports: Vec<VerificationReport>) -> Self {
        Self { reports }
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_json_compact(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_within_tolerance() {
        assert!(VerificationReport::new("a", 1e-7, 1e-6).pass);
        assert!(VerificationReport::new("a", 1e-6, 1e-6).pass);
        assert!(!VerificationReport::new("a", 2e-6, 1e-6).pass);
        assert!(!VerificationReport::new("a", f64::NAN, 1e-6).pass);
        assert!(VerificationReport::audit("x", true).pass);
        assert!(!VerificationReport::audit("x", false).pass);
    }

    #[test]
    fn json_schema() {
        let r = VerificationReport::new("c", 0.5, 1.0).with("order", 24);
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["check"], "c");
        assert_eq!(v["pass"], true);
        assert_eq!(v["metadata"]["order"], 24);
        assert_eq!(ReportBundle::default().to_json_compact(), r#"{"reports":[]}"#);
    }
}

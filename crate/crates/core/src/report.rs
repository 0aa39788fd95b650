//! Probe reports: the JSON-lines records emitted by inequality probes and
//! identity checks.

use serde::Serialize;

/// One probe outcome: `{probe, params, lhs, rhs, ratio, pass}`.
#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub probe: String,
    pub params: serde_json::Value,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

impl ProbeReport {
    pub fn new(
        probe: impl Into<String>,
        params: serde_json::Value,
        lhs: f64,
        rhs: f64,
        pass: bool,
    ) -> Self {
        let ratio = if rhs == 0.0 && lhs == 0.0 {
            0.0
        } else {
            lhs / rhs
        };
        ProbeReport {
            probe: probe.into(),
            params,
            lhs,
            rhs,
            ratio,
            pass,
        }
    }

    /// One JSON-lines record.
    pub fn to_jsonl(&self) -> String {
        serde_json::to_string(self).expect("probe report serializes")
    }
}

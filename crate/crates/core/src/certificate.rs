//! Certificates emitted by the exhaustive checkers.

use serde::Serialize;
use serde_json::Value;

/// Outcome of a bounded exhaustive check.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    /// The whole search space named in `bounds` was examined and the
    /// property held everywhere.
    Verified,
    /// The property fails; `witness` is the first offending candidate in
    /// the checker's canonical enumeration order.
    Counterexample { witness: Value, reason: String },
    /// The budget did not allow a meaningful or complete check.
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GadgetCertificate {
    pub gadget: String,
    pub mode: String,
    pub bounds: Value,
    pub verdict: Verdict,
    pub examined: u64,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub details: Value,
}

impl GadgetCertificate {
    pub fn is_verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self.verdict, Verdict::Inconclusive { .. })
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

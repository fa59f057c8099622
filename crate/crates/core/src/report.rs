//! Machine-readable command results.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// The outcome of one command. Serialization is deterministic; wall time is
/// only included when requested.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub command: String,
    /// SHA-256 over the command's inputs (file contents and parameters).
    pub inputs_digest: String,
    pub verdict: String,
    /// False when the command found something wrong: a failed verification
    /// or an expectation mismatch.
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u128>,
}

impl RunReport {
    pub fn new(command: &str, inputs_digest: String, verdict: impl Into<String>) -> RunReport {
        RunReport {
            command: command.into(),
            inputs_digest,
            verdict: verdict.into(),
            ok: true,
            certificate: None,
            witness: None,
            details: None,
            wall_time_ms: None,
        }
    }

    pub fn failed(mut self) -> Self {
        self.ok = false;
        self
    }

    pub fn with_certificate(mut self, value: impl Serialize) -> Self {
        self.certificate = Some(to_value(value));
        self
    }

    pub fn with_witness(mut self, value: impl Serialize) -> Self {
        self.witness = Some(to_value(value));
        self
    }

    pub fn with_details(mut self, value: impl Serialize) -> Self {
        self.details = Some(to_value(value));
        self
    }
}

fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("report payloads serialize")
}

/// Digest of a sequence of labelled inputs; labels keep `("a", "bc")` and
/// `("ab", "c")` apart.
pub fn digest(parts: &[(&str, &[u8])]) -> String {
    let mut h = Sha256::new();
    for (label, bytes) in parts {
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_separates_labels() {
        assert_ne!(digest(&[("a", b"bc")]), digest(&[("ab", b"c")]));
        assert_eq!(digest(&[("x", b"1")]), digest(&[("x", b"1")]));
        assert!(digest(&[]).starts_with("sha256:"));
    }

    #[test]
    fn optional_fields_are_omitted() {
        let r = RunReport::new("threshold", digest(&[]), "threshold");
        let text = serde_json::to_string(&r).unwrap();
        assert!(!text.contains("wall_time_ms"));
        assert!(!text.contains("witness"));
    }
}

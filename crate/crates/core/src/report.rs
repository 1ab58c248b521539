use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Uniform result of every identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub parameters: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default)]
    pub timing_ms: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl VerificationReport {
    pub fn new(identity: &str, parameters: String, residual: f64, tolerance: f64) -> Self {
        VerificationReport {
            identity: identity.into(),
            parameters,
            residual,
            tolerance,
            pass: residual <= tolerance,
            timing_ms: 0.0,
            note: String::new(),
        }
    }

    /// A check that should exceed `threshold` (a detector firing).
    pub fn expect_above(identity: &str, parameters: String, value: f64, threshold: f64) -> Self {
        VerificationReport {
            identity: identity.into(),
            parameters,
            residual: value,
            tolerance: threshold,
            pass: value > threshold,
            timing_ms: 0.0,
            note: "pass requires residual above tolerance".into(),
        }
    }

    pub fn with_note(mut self, note: &str) -> Self {
        self.note = note.into();
        self
    }

    pub fn failed(identity: &str, parameters: String, err: &Error) -> Self {
        VerificationReport {
            identity: identity.into(),
            parameters,
            residual: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
            timing_ms: 0.0,
            note: format!("error: {err}"),
        }
    }
}

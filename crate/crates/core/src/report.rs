//! Machine-readable run reports. Everything except `timings` is a function of
//! the command line and the input bytes.

use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// JSON Schema for [`RunReport`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/run_report.schema.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(role: &str, path: &Path, bytes: &[u8]) -> Self {
        InputDigest { role: role.to_string(), path: path.display().to_string(), sha256: sha256_hex(bytes) }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ArtifactRef {
    pub kind: String,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub verdict: String,
    pub exit_code: i32,
    pub details: serde_json::Value,
    pub artifacts: Vec<ArtifactRef>,
    pub timings: Timings,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.to_string(),
            inputs: Vec::new(),
            verdict: String::new(),
            exit_code: 0,
            details: serde_json::Value::Null,
            artifacts: Vec::new(),
            timings: Timings { total_ms: 0.0 },
        }
    }

    pub fn set_elapsed(&mut self, d: Duration) {
        self.timings.total_ms = (d.as_secs_f64() * 1e6).round() / 1e3;
    }

    pub fn artifact(&mut self, kind: &str, path: &Path) {
        self.artifacts.push(ArtifactRef { kind: kind.to_string(), path: path.display().to_string() });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn schema_is_json() {
        let v: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        assert_eq!(v["type"], "object");
    }
}

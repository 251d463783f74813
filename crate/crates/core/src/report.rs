//! Deterministic machine-readable run reports.
//!
//! Every CLI run emits one JSON document with three fixed top-level blocks:
//!
//! * `header` — tool identity, command name, and the run timestamp. This is
//!   the only block allowed to differ between two runs with identical
//!   configuration and inputs.
//! * `config` — the fully resolved configuration, including the SHA-256
//!   digest of the factor-cache file when one was loaded, so reruns are
//!   comparable byte for byte.
//! * `result` — the command-specific payload.
//!
//! Struct fields serialize in declaration order and all dynamic maps are
//! ordered (`BTreeMap` upstream), so the document layout is reproducible.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// RFC 3339 UTC, second precision. Isolated here so that stripping the
    /// header block makes two equivalent runs byte-identical.
    pub timestamp: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub header: ReportHeader,
    pub config: Value,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, version: &str, config: Value, result: Value) -> Self {
        Report {
            header: ReportHeader {
                tool: "upn".into(),
                version: version.into(),
                command: command.into(),
                timestamp: utc_now_rfc3339(),
            },
            config,
            result,
        }
    }

    /// Pretty JSON with a trailing newline, ready to write to disk.
    pub fn to_pretty_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Hex SHA-256 of a byte string (cache files, config echoes).
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
pub fn utc_now_rfc3339() -> String {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .expect("clock after epoch")
        .as_secs();
    rfc3339_from_unix(secs)
}

/// Civil-time conversion without a calendar dependency; one timestamp field
/// does not justify one. Days-to-date follows Howard Hinnant's published
/// `civil_from_days` algorithm, exact over the whole u64 range used here.
fn rfc3339_from_unix(secs: u64) -> String {
    let days = (secs / 86_400) as i64;
    let rem = secs % 86_400;
    let (h, min, s) = (rem / 3600, (rem % 3600) / 60, rem % 60);

    let z = days + 719_468;
    let era = z / 146_097;
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = if m <= 2 { y + 1 } else { y };

    format!("{y:04}-{m:02}-{d:02}T{h:02}:{min:02}:{s:02}Z")
}

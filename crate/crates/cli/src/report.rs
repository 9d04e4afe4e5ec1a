//! Versioned report envelope and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use hyperlab_core::density::Verdict;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "hyperlab-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Fully resolved configuration, defaults included.
    pub config: Value,
    pub result: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl Report {
    pub fn new(command: &str, config: Value, result: Value) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            result,
            verdict: None,
            expected: None,
            flags: Vec::new(),
        }
    }

    /// True unless an expectation was set and missed.
    pub fn matches(&self) -> bool {
        match (self.expected, self.verdict) {
            (Some(e), Some(v)) => e == v,
            (Some(_), None) => false,
            (None, _) => true,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Writes `contents` next to `path` under a temporary name, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expectation_matching() {
        let mut r = Report::new("kronecker", Value::Null, Value::Null);
        assert!(r.matches());
        r.expected = Some(Verdict::DenseEvidence);
        assert!(!r.matches());
        r.verdict = Some(Verdict::DenseEvidence);
        assert!(r.matches());
        let back: Report = serde_json::from_str(&r.to_json_string()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.schema, SCHEMA);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/report.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}

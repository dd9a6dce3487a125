//! Key/value run reports.

use std::fmt;
use std::time::Duration;

use sha2::{Digest, Sha256};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Ordered `key=value` lines, headed by the tool name and version.
#[derive(Clone, Debug, Default)]
pub struct Report {
    entries: Vec<(String, String)>,
    /// Leave out wall-clock entries so reruns are byte-identical.
    pub deterministic: bool,
}

impl Report {
    pub fn new(command: &str, deterministic: bool) -> Report {
        let mut r = Report {
            entries: Vec::new(),
            deterministic,
        };
        r.kv("tool", TOOL).kv("version", VERSION).kv("command", command);
        r
    }

    pub fn kv(&mut self, key: &str, value: impl fmt::Display) -> &mut Report {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    /// Records an input file by name and sha256 digest.
    pub fn input(&mut self, name: &str, bytes: &[u8]) -> &mut Report {
        self.kv("input", format!("{name} sha256={}", sha256_hex(bytes)))
    }

    pub fn time(&mut self, key: &str, d: Duration) -> &mut Report {
        if !self.deterministic {
            self.kv(key, format!("{:.3}", d.as_secs_f64()));
        }
        self
    }

    pub fn values(&self, key: &str) -> Vec<&str> {
        self.entries.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
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
    fn deterministic_reports_drop_times() {
        let mut r = Report::new("x", true);
        r.time("wall_time", Duration::from_millis(5)).kv("a", 1);
        assert_eq!(r.to_string(), format!("tool={TOOL}\nversion={VERSION}\ncommand=x\na=1\n"));
        assert_eq!(r.get("a"), Some("1"));
    }
}

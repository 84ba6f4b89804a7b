//! Flat key-value configuration files with command-line overrides.
//!
//! Format: one `key = value` per line, `#` comments, blank lines ignored.
//! Keys are dotted paths (`grid.n`, `params.tau`). The optional `schema`
//! key versions the format; this build reads schema 1.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

pub const SCHEMA_VERSION: u64 = 1;

/// Parsed configuration, insertion order normalized by the sorted map so
/// the manifest echo is deterministic.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Config::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} is not `key = value`: {raw:?}", lineno + 1);
            };
            cfg.values.insert(key.trim().to_string(), value.trim().to_string());
        }
        if let Some(schema) = cfg.get_u64("schema")? {
            if schema > SCHEMA_VERSION {
                bail!("config schema {schema} is newer than supported {SCHEMA_VERSION}");
            }
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>> {
        self.values
            .get(key)
            .map(|v| v.parse::<f64>().with_context(|| format!("config key {key} = {v:?} is not a number")))
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>> {
        self.values
            .get(key)
            .map(|v| v.parse::<u64>().with_context(|| format!("config key {key} = {v:?} is not an integer")))
            .transpose()
    }

    /// Sorted `key = value` echo for the run manifest.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}

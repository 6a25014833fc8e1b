//! Flat `key = value` config files mirroring the long flag names.
//! Lines starting with `#` are comments; explicit flags take precedence.

use std::collections::HashMap;
use std::path::Path;

use crate::CliError;

#[derive(Default)]
pub struct KvConfig {
    entries: HashMap<String, String>,
}

impl KvConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config `{}`: {e}", path.display())))?;
        let mut entries = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config `{}` line {}: expected `key = value`, found `{line}`",
                    path.display(),
                    idx + 1
                )));
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(KvConfig { entries })
    }

    /// Parsed value for `key`, if present.
    pub fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Usage(format!("config value for `{key}` is invalid: `{raw}`"))
            }),
        }
    }
}

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use thiserror::Error;

/// Effective `key=value` settings of one invocation, in key order.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

#[derive(Debug, Error)]
pub enum SettingsError {
    #[error("unknown setting {key:?} for this command")]
    UnknownKey { key: String },
    #[error("missing required setting {0:?}")]
    Missing(String),
    #[error("bad value {value:?} for {key}")]
    BadValue { key: String, value: String },
    #[error("config line {line}: expected key=value")]
    BadLine { line: usize },
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
}

/// Placeholder for settings that have no default and must be given.
pub const REQUIRED: &str = "<required>";

impl Settings {
    pub fn new(defaults: &[(&str, String)]) -> Self {
        Self {
            values: defaults.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), SettingsError> {
        match self.values.get_mut(key) {
            Some(v) => {
                *v = value.trim().to_string();
                Ok(())
            }
            None => Err(SettingsError::UnknownKey { key: key.into() }),
        }
    }

    /// Applies `key=value` lines, skipping blanks and `#` comments.
    pub fn apply_text(&mut self, text: &str) -> Result<(), SettingsError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(SettingsError::BadLine { line: i + 1 })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), SettingsError> {
        let text = fs::read_to_string(path).map_err(|source| SettingsError::Read {
            path: path.display().to_string(),
            source,
        })?;
        self.apply_text(&text)
    }

    pub fn get(&self, key: &str) -> Result<&str, SettingsError> {
        match self.values.get(key).map(String::as_str) {
            Some(REQUIRED) => Err(SettingsError::Missing(key.into())),
            Some(v) => Ok(v),
            None => Err(SettingsError::UnknownKey { key: key.into() }),
        }
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<T, SettingsError> {
        let v = self.get(key)?;
        v.parse().map_err(|_| SettingsError::BadValue {
            key: key.into(),
            value: v.into(),
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

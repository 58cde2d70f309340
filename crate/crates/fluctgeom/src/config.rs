//! Flat `key = value` text configuration. Nested structures are rejected;
//! every key maps to one scalar or string token, which keeps fixtures
//! trivially diffable.

use std::collections::BTreeMap;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got {content:?}")]
    BadLine { line: usize, content: String },
    #[error("duplicate key {0:?}")]
    DuplicateKey(String),
    #[error("key {key:?}: cannot parse {value:?} as {wanted}")]
    BadValue {
        key: String,
        value: String,
        wanted: &'static str,
    },
    #[error("missing required key {0:?}")]
    MissingKey(String),
}

/// A parsed configuration: ordered key → raw string value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut map = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::BadLine {
                line: line_no,
                content: raw.trim().to_string(),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::BadLine {
                    line: line_no,
                    content: raw.trim().to_string(),
                });
            }
            if map.contains_key(&key) {
                return Err(ConfigError::DuplicateKey(key));
            }
            map.insert(key, value);
        }
        Ok(Self { map })
    }

    pub fn contains(&self, key: &str) -> bool {
        self.map.contains_key(key)
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.typed(key, "a real number")
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.typed(key, "a nonnegative integer")
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, ConfigError> {
        self.typed(key, "a nonnegative integer")
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.get_f64(key)?
            .ok_or_else(|| ConfigError::MissingKey(key.to_string()))
    }

    fn typed<V: std::str::FromStr>(
        &self,
        key: &str,
        wanted: &'static str,
    ) -> Result<Option<V>, ConfigError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| ConfigError::BadValue {
                key: key.to_string(),
                value: raw.clone(),
                wanted,
            }),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.map.keys().map(String::as_str)
    }
}

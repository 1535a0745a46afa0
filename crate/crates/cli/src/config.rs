//! Flat key-value config files. Lines look like `beta = 1.0`; `#` starts a
//! comment. Command-line flags always override file values.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default)]
pub struct FileConfig {
    values: HashMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        let mut values = HashMap::new();
        for (index, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "{}:{}: expected `key = value`, got `{raw_line}`",
                    path.display(),
                    index + 1
                );
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get_raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| anyhow::anyhow!("config key `{key}`: cannot parse `{raw}`: {e}")),
        }
    }
}

/// Flag value, then config-file value, then the built-in default.
pub fn resolve<T>(flag: Option<T>, file: &FileConfig, key: &str, default: T) -> Result<T>
where
    T: FromStr,
    T::Err: Display,
{
    Ok(match flag {
        Some(value) => value,
        None => file.get::<T>(key)?.unwrap_or(default),
    })
}

/// Comma-separated list of probabilities, e.g. `0.1,0.01`.
pub fn parse_eps_list(raw: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in raw.split(',') {
        let eps: f64 = item
            .trim()
            .parse()
            .map_err(|e| anyhow::anyhow!("eps list entry `{item}`: {e}"))?;
        if !(eps.is_finite() && 0.0 < eps && eps < 1.0) {
            bail!("eps list entry `{item}` must lie in (0, 1)");
        }
        out.push(eps);
    }
    if out.is_empty() {
        bail!("eps list is empty");
    }
    Ok(out)
}

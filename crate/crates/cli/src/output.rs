//! Output-directory handling and the CSV/JSON writers shared by the
//! subcommands. CSV floats use 17 significant digits and a `.` decimal
//! point; JSON maps non-finite values to `null`.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Comma-separated values with 17-significant-digit floats.
    Csv,
    /// One JSON document per data file.
    Json,
}

impl std::str::FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => anyhow::bail!("format must be `csv` or `json`, got `{other}`"),
        }
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))
}

pub fn write_text(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn write_json<T: Serialize>(path: &PathBuf, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .with_context(|| format!("serializing {}", path.display()))?;
    text.push('\n');
    write_text(path, &text)
}

/// `None` for non-finite values so JSON stays standard; consumers read
/// `null` as "unbounded"/"undefined".
pub fn finite_or_none(value: f64) -> Option<f64> {
    value.is_finite().then_some(value)
}

pub use landauer::fmt::g17;

//! Run settings from flags and an optional `key = value` file.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub quad_tol: f64,
    pub series_tol: f64,
    pub root_tol: f64,
    pub membership_tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            quad_tol: 1e-11,
            series_tol: 1e-12,
            root_tol: 1e-10,
            membership_tol: w9_core::w9::MEMBERSHIP_TOL,
            format: Format::Json,
            out: None,
        }
    }
}

fn positive(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .with_context(|| format!("{key}: '{value}' is not a number"))?;
    if !(v > 0.0) {
        bail!("{key} must be positive, got {v}");
    }
    Ok(v)
}

impl RunConfig {
    /// Applies one setting; keys may use `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.replace('_', "-").as_str() {
            "quad-tol" => self.quad_tol = positive(key, value)?,
            "series-tol" => self.series_tol = positive(key, value)?,
            "root-tol" => self.root_tol = positive(key, value)?,
            "membership-tol" => self.membership_tol = positive(key, value)?,
            "format" => {
                self.format = match value {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    other => bail!("format must be json or csv, got '{other}'"),
                }
            }
            "out" => self.out = Some(PathBuf::from(value)),
            other => bail!("unknown setting '{other}'"),
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment, quotes are optional.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .with_context(|| format!("{}:{}: expected key = value", path.display(), n + 1))?;
            let v = v.trim().trim_matches('"');
            self.set(k.trim(), v)
                .with_context(|| format!("{}:{}", path.display(), n + 1))?;
        }
        Ok(())
    }
}

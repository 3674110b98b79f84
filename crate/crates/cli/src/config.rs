//! Experiment configuration: a JSON file mirroring the CLI flags, merged
//! with the flags themselves (flags win), echoed into a metadata sidecar so
//! every run can be reproduced from its own output.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// All tunables of a run, every one optional; unset fields fall back to the
/// command's defaults. Field names mirror the CLI flag names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge_file: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub io: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift_io: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tmax: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pst_threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_cap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shifts: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sizes: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_eval: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_range: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dump_hamiltonian: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

/// Sidecar written next to every output file: the effective configuration
/// plus provenance. Feeding the sidecar back via `--config` reproduces the
/// run byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub config: FileConfig,
    pub version: String,
    pub wall_clock_seconds: f64,
}

/// Load a config file; accepts either a bare `FileConfig` object or a
/// metadata sidecar (the `config` key is used).
pub fn load_config(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .with_context(|| format!("parsing config {}", path.display()))?;
    let body = match value.get("config") {
        Some(inner) => inner.clone(),
        None => value,
    };
    let config: FileConfig = serde_json::from_value(body)
        .with_context(|| format!("interpreting config {}", path.display()))?;
    Ok(config)
}

/// Sidecar path for an output file: `results.csv` -> `results.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    out.with_file_name(format!("{stem}.meta.json"))
}

pub fn write_sidecar(out: &Path, meta: &Metadata) -> Result<()> {
    let path = sidecar_path(out);
    let text = serde_json::to_string_pretty(meta)?;
    std::fs::write(&path, text + "\n")
        .with_context(|| format!("writing sidecar {}", path.display()))?;
    Ok(())
}

/// "I,J" -> (I, J)
pub fn parse_io(text: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        bail!("--io expects `I,J`, got `{text}`");
    }
    Ok((parts[0].trim().parse()?, parts[1].trim().parse()?))
}

/// "A,B" -> (A, B)
pub fn parse_window(text: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        bail!("--window expects `A,B`, got `{text}`");
    }
    Ok((parts[0].trim().parse()?, parts[1].trim().parse()?))
}

/// "V:X" -> (V, X)
pub fn parse_shift_entry(text: &str) -> Result<(usize, f64)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 2 {
        bail!("--shift expects `VERTEX:VALUE`, got `{text}`");
    }
    Ok((parts[0].trim().parse()?, parts[1].trim().parse()?))
}

/// "start:stop:count" -> linear grid parameters
pub fn parse_sigma2(text: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        bail!("--sigma2 expects `START:STOP:COUNT`, got `{text}`");
    }
    let start: f64 = parts[0].trim().parse()?;
    let stop: f64 = parts[1].trim().parse()?;
    let count: usize = parts[2].trim().parse()?;
    if count == 0 {
        bail!("--sigma2 count must be positive");
    }
    Ok((start, stop, count))
}

/// Comma-separated list of numbers.
pub fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(Into::into))
        .collect()
}

pub fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(Into::into))
        .collect()
}

/// "A..B" (inclusive) or a single integer.
pub fn parse_inclusive_range(text: &str) -> Result<(usize, usize)> {
    if let Some((a, b)) = text.split_once("..") {
        let lo: usize = a.trim().parse()?;
        let hi: usize = b.trim().parse()?;
        if lo > hi {
            bail!("empty range `{text}`");
        }
        Ok((lo, hi))
    } else {
        let v: usize = text.trim().parse()?;
        Ok((v, v))
    }
}

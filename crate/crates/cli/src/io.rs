//! Channel files, CSV formatting and run manifests.

use crate::error::{CliError, CliResult};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::{Path, PathBuf};
use wbc_core::probcore::{Dmc, WiretapBc, SUM_TOL};

/// On-disk channel description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub input_size: usize,
    pub y1: Vec<Vec<f64>>,
    pub y2: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

fn check_matrix(label: &str, rows: &[Vec<f64>], input_size: usize) -> CliResult<Dmc> {
    if rows.len() != input_size {
        return Err(CliError::Parse(format!("{label} has {} rows, expected input_size = {input_size}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.is_empty() || row.len() != rows[0].len() {
            return Err(CliError::Parse(format!(
                "{label} row {i} has {} entries, expected {}",
                row.len(),
                rows[0].len()
            )));
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(CliError::Parse(format!("{label} row {i} has invalid entry {v}")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(CliError::Parse(format!("{label} row {i} sums to {sum}, expected 1")));
        }
    }
    Dmc::new(rows.to_vec()).map_err(|e| CliError::Parse(format!("{label}: {e}")))
}

impl ChannelFile {
    pub fn parse(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("channel file: {e}")))
    }

    pub fn to_channel(&self) -> CliResult<WiretapBc> {
        let y1 = check_matrix("y1", &self.y1, self.input_size)?;
        let y2 = check_matrix("y2", &self.y2, self.input_size)?;
        let z = check_matrix("z", &self.z, self.input_size)?;
        WiretapBc::new(y1, y2, z).map_err(|e| CliError::Parse(e.to_string()))
    }
}

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn load_channel(path: &Path) -> CliResult<WiretapBc> {
    ChannelFile::parse(&read_text(path)?)?.to_channel()
}

/// Formats `x` with 12 significant digits, without trailing zeros.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x == 0.0 {
            "0".into()
        } else {
            format!("{x}")
        };
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').unwrap_or((&s, "0"));
        let mant = if mant.contains('.') { mant.trim_end_matches('0').trim_end_matches('.') } else { mant };
        format!("{mant}e{e}")
    }
}

/// Renders a table as CSV text.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Failed(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failed(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn json_text<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Provenance record written next to every output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    pub params: Value,
    pub seed: Option<u64>,
    pub version: String,
    pub timestamp: String,
}

impl Manifest {
    pub fn new(command: &str, params: Value, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Writes `payload` to `out` with its manifest, or to stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, payload: &str, manifest: &Manifest) -> CliResult<()> {
    match out {
        Some(path) => {
            write_file(path, payload)?;
            write_file(&manifest_path(path), &json_text(manifest)?)
        }
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

/// `base` with `suffix` appended to its file name.
pub fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// 64-bit seed from a master seed and an ordered label list.
///
/// Each label is length-prefixed so ("ab", "c") and ("a", "bc") differ.
pub fn derive_seed(master: u64, labels: &[&str]) -> u64 {
    let mut h = Sha256::new();
    h.update(b"aqt-seed");
    h.update(master.to_le_bytes());
    for l in labels {
        h.update((l.len() as u64).to_le_bytes());
        h.update(l.as_bytes());
    }
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("8 bytes"))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// A CSV field.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}
impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}
impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}
impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

pub fn csv(header: &[&str], rows: &[Vec<Cell>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let fields: Vec<String> = r
            .iter()
            .map(|c| match c {
                Cell::Int(v) => v.to_string(),
                Cell::Num(v) => fmt_f64(*v),
                Cell::Text(t) => t.clone(),
            })
            .collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Header and rows of a CSV file with a header row.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Domain(format!("{}: empty file", path.display())))?
        .split(',')
        .map(|h| h.trim().to_string())
        .collect();
    let rows = lines.map(|l| l.split(',').map(|f| f.trim().to_string()).collect()).collect();
    Ok((header, rows))
}

pub fn envelope(params: Value, results: Value) -> String {
    let v = serde_json::json!({ "schema_version": SCHEMA_VERSION, "params": params, "results": results });
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

pub fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

/// Resolve an output path; relative paths go under `AQT_OUT_DIR` when set.
pub fn out_path(p: &Path) -> PathBuf {
    match std::env::var_os("AQT_OUT_DIR") {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

/// Provenance of one invocation, written next to its outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunRecord {
    pub command_line: Vec<String>,
    /// sha256 of the effective parameters after merging flags, file and defaults.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<OutputDigest>,
    pub version: String,
}

pub fn now_unix() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

/// Collects written files for the run record.
pub struct Sink {
    pub argv: Vec<String>,
    pub params: Value,
    pub seed: Option<u64>,
    started: f64,
    written: Vec<(PathBuf, String)>,
}

impl Sink {
    pub fn new(argv: Vec<String>, params: Value, seed: Option<u64>) -> Self {
        Sink { argv, params, seed, started: now_unix(), written: Vec::new() }
    }

    pub fn write(&mut self, path: &Path, content: &str) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        fs::write(path, content).map_err(|e| io_err(path, e))?;
        self.written.push((path.to_path_buf(), sha256_hex(content.as_bytes())));
        Ok(())
    }

    /// Write the run record as `<first output>.run.json`.
    pub fn finish(self) -> Result<Option<PathBuf>> {
        let Some((first, _)) = self.written.first() else {
            return Ok(None);
        };
        let mut name = first.file_name().unwrap_or_default().to_os_string();
        name.push(".run.json");
        let path = first.with_file_name(name);
        let rec = RunRecord {
            command_line: self.argv,
            config_hash: sha256_hex(serde_json::to_string(&self.params).expect("json").as_bytes()),
            seed: self.seed,
            started_unix: self.started,
            finished_unix: now_unix(),
            outputs: self
                .written
                .iter()
                .map(|(p, h)| OutputDigest { path: p.display().to_string(), sha256: h.clone() })
                .collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let text = serde_json::to_string_pretty(&rec).expect("json") + "\n";
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
        Ok(Some(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_order_sensitive() {
        assert_eq!(derive_seed(7, &["a", "b"]), derive_seed(7, &["a", "b"]));
        assert_ne!(derive_seed(7, &["a", "b"]), derive_seed(7, &["b", "a"]));
        assert_ne!(derive_seed(7, &["ab", "c"]), derive_seed(7, &["a", "bc"]));
        assert_ne!(derive_seed(7, &["a"]), derive_seed(8, &["a"]));
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 4.97, f64::MAX] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }
}

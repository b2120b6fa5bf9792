//! In-memory artifacts and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ScenarioConfig;
use crate::error::Result;

/// A file produced by a scenario, held in memory until the run succeeds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn json<T: Serialize>(path: impl Into<String>, value: &T) -> Artifact {
        let mut bytes = serde_json::to_vec_pretty(value).expect("summaries serialize");
        bytes.push(b'\n');
        Artifact { path: path.into(), bytes }
    }

    pub fn sha256(&self) -> String {
        hex::encode(Sha256::digest(&self.bytes))
    }

    pub fn nested(mut self, dir: &str) -> Artifact {
        self.path = format!("{dir}/{}", self.path);
        self
    }
}

/// Comma-separated table with a mandatory header, 17 significant digits and
/// LF line endings.
pub struct CsvTable {
    columns: usize,
    text: String,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> CsvTable {
        let mut text = header.join(",");
        text.push('\n');
        CsvTable { columns: header.len(), text }
    }

    pub fn row(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.columns, "row width must match the header");
        let cells: Vec<String> = values.iter().map(|v| format_float(*v)).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_artifact(self, path: impl Into<String>) -> Artifact {
        Artifact { path: path.into(), bytes: self.text.into_bytes() }
    }
}

pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        // adding zero turns -0.0 into 0.0
        format!("{:.16e}", v + 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutputEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: ScenarioConfig,
    pub resolved_defaults: Vec<String>,
    pub wall_time_seconds: f64,
    pub outputs: Vec<OutputEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

impl Manifest {
    pub fn new(config: &ScenarioConfig, artifacts: &[Artifact], wall_time_seconds: f64) -> Manifest {
        Manifest {
            tool: "decohere",
            version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
            resolved_defaults: config.resolved_defaults.clone(),
            wall_time_seconds,
            outputs: artifacts
                .iter()
                .map(|a| OutputEntry { path: a.path.clone(), bytes: a.bytes.len(), sha256: a.sha256() })
                .collect(),
        }
    }
}

/// Writes every artifact under `out_dir`, then the manifest.
pub fn write_run(out_dir: &Path, artifacts: &[Artifact], manifest: &Manifest) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    for a in artifacts {
        let path = out_dir.join(&a.path);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, &a.bytes)?;
    }
    let path = out_dir.join(MANIFEST_NAME);
    fs::write(&path, Artifact::json(MANIFEST_NAME, manifest).bytes)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_dialect() {
        let mut t = CsvTable::new(&["t", "x"]);
        t.row(&[0.0, 1.0 / 3.0]);
        t.row(&[-2.5e-300, f64::INFINITY]);
        let text = String::from_utf8(t.into_artifact("a.csv").bytes).unwrap();
        assert_eq!(text, "t,x\n0.0000000000000000e0,3.3333333333333331e-1\n-2.5000000000000000e-300,inf\n");
    }

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 7.0, 6.02214076e23, -1e-17, f64::MIN_POSITIVE] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn digest_is_sha256() {
        let a = Artifact { path: "x".into(), bytes: b"abc".to_vec() };
        assert_eq!(a.sha256(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}

//! Declarative scenario runner for `decohere-core`.
//!
//! A run parses a TOML config, computes every output in memory, then writes
//! CSV and JSON files plus a `manifest.json` carrying SHA-256 digests of
//! each output. Identical configs produce byte-identical outputs.

pub mod config;
pub mod error;
pub mod output;
pub mod scenario;

use std::path::Path;
use std::time::Instant;

pub use config::{parse_config, Kind, ScenarioConfig};
pub use error::{CliError, Result};
pub use output::{Artifact, Manifest};

/// Reads and validates a config file.
pub fn load_config(path: &Path, expected: Option<Kind>, seed: Option<u64>) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text, expected, seed)
}

/// Runs `cfg` and writes its outputs and manifest under `out_dir`.
pub fn execute(cfg: &ScenarioConfig, out_dir: &Path) -> Result<Manifest> {
    let start = Instant::now();
    let artifacts = scenario::run(cfg)?;
    let manifest = Manifest::new(cfg, &artifacts, start.elapsed().as_secs_f64());
    output::write_run(out_dir, &artifacts, &manifest)?;
    Ok(manifest)
}

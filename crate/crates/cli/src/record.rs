use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::{canonical, formats, SCHEMA_VERSION};

/// Metadata written alongside every command's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub command: String,
    /// Fully resolved configuration, including defaults.
    pub config: serde_json::Value,
    pub seeds: Vec<u64>,
    /// Crate version and `git describe` of the build.
    pub version: String,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
}

impl RunRecord {
    pub fn new(command: &str, config: impl Serialize, seeds: Vec<u64>) -> Result<Self> {
        Ok(Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            seeds,
            version: version_string(),
            timings: BTreeMap::new(),
            outputs: Vec::new(),
        })
    }

    pub fn time(&mut self, phase: &str, seconds: f64) {
        self.timings.insert(phase.to_string(), seconds);
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        formats::write_string(path, &canonical::to_string(self)?)
    }
}

pub fn version_string() -> String {
    format!("{} ({})", env!("CARGO_PKG_VERSION"), env!("RAD_GIT_DESCRIBE"))
}

/// Where a single-file command puts its record: `<out>.run.json`.
pub fn record_path_for(out: &Path) -> std::path::PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".run.json");
    name.into()
}

//! Run manifests: what was run, on which input, with which parameters.
//! Written next to each output file as `<output>.manifest.json`.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub dist_path: String,
    pub parameters: Value,
    pub tool_version: &'static str,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str, dist_path: &Path, parameters: Value) -> Self {
        Self {
            command: command.to_string(),
            dist_path: dist_path.display().to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION"),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    pub fn path_for(output: &Path) -> PathBuf {
        sibling(output, "manifest.json")
    }

    pub fn write_beside(&self, output: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes") + "\n";
        std::fs::write(Self::path_for(output), text)
    }
}

/// `dir/name.ext` -> `dir/name.ext.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

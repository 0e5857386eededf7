//! Layered configuration: a TOML file supplies defaults, flags override
//! field by field, and only the output directory and thread count listen to
//! environment variables.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

/// File-level configuration; every field optional so flags can win.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub words: Section,
    #[serde(default)]
    pub grow: Section,
    #[serde(default)]
    pub limit: Section,
    #[serde(default)]
    pub compare: Section,
    #[serde(default)]
    pub tvscan: Section,
    #[serde(default)]
    pub oulimit: Section,
}

/// Free-form per-command table; commands pull the keys they understand.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
pub struct Section(pub toml::value::Table);

impl Section {
    pub fn u64(&self, key: &str) -> Option<u64> {
        self.0.get(key).and_then(|v| v.as_integer()).map(|v| v as u64)
    }

    pub fn usize(&self, key: &str) -> Option<usize> {
        self.u64(key).map(|v| v as usize)
    }

    pub fn f64(&self, key: &str) -> Option<f64> {
        self.0.get(key).and_then(|v| v.as_float().or_else(|| v.as_integer().map(|i| i as f64)))
    }

    pub fn string(&self, key: &str) -> Option<String> {
        self.0.get(key).and_then(|v| v.as_str()).map(str::to_owned)
    }
}

pub fn load(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// FNV-1a over the canonical JSON of the effective settings; embedded in
/// every report so a result can be traced to its exact configuration.
pub fn config_hash(value: &impl Serialize) -> String {
    let json = serde_json::to_string(value).expect("config serializes");
    let mut hash: u64 = 0xcbf29ce484222325;
    for b in json.as_bytes() {
        hash ^= *b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

//! Optional TOML configuration; command-line flags take precedence.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const CHECKPOINT_DIR_ENV: &str = "QTOWER_CHECKPOINT_DIR";
pub const DEFAULT_CONFIG_FILE: &str = "qtower.toml";

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub scan: ScanConfig,
    pub conic: ConicConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Largest discriminant a scan may reach.
    pub max_bound: i64,
    /// Discriminants per checkpointed chunk.
    pub chunk: i64,
    pub threads: Option<usize>,
    pub verify: bool,
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConicConfig {
    pub bound: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { max_bound: 10_000_000, chunk: 5_000, threads: None, verify: false, timing: false }
    }
}

impl Default for ConicConfig {
    fn default() -> Self {
        ConicConfig { bound: qtower::conic::DEFAULT_SEARCH_BOUND }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Reads `path`, or `qtower.toml` in the working directory if present.
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let (path, required) = match path {
            Some(p) => (p.to_path_buf(), true),
            None => (PathBuf::from(DEFAULT_CONFIG_FILE), false),
        };
        match std::fs::read_to_string(&path) {
            Ok(text) => Config::from_toml(&text).map_err(|e| format!("{}: {e}", path.display())),
            Err(_) if !required => Ok(Config::default()),
            Err(e) => Err(format!("{}: {e}", path.display())),
        }
    }
}

pub fn checkpoint_dir() -> Option<PathBuf> {
    std::env::var_os(CHECKPOINT_DIR_ENV).map(PathBuf::from)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_config() {
        let c = Config::from_toml("[scan]\nchunk = 100\n").unwrap();
        assert_eq!(c.scan.chunk, 100);
        assert_eq!(c.scan.max_bound, ScanConfig::default().max_bound);
        assert!(Config::from_toml("[scan]\nbogus = 1\n").is_err());
    }
}

use std::path::{Path, PathBuf};

use logichint_core::search::SearchConfig;
use logichint_gateway::BackendConfig;
use logichint_prompt::Strategy;
use serde::Deserialize;
use thiserror::Error;

/// Service settings, read from TOML. Every field has a default.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: String,
    /// Session logs go to `<data_dir>/sessions`.
    pub data_dir: PathBuf,
    /// Directory of problem JSON files; the bundled set when absent.
    pub problems_dir: Option<PathBuf>,
    /// Allowed browser origins; empty allows any.
    pub cors_origins: Vec<String>,
    pub hint_strategy: Strategy,
    /// Backend for `source=llm` hints; such requests get 503 without one.
    pub backend: Option<BackendConfig>,
    pub search: SearchConfig,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: "127.0.0.1:8080".into(),
            data_dir: "var".into(),
            problems_dir: None,
            cors_origins: Vec::new(),
            hint_strategy: Strategy::FS_CoT,
            backend: None,
            search: SearchConfig::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("service config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("service config: {0}")]
    Invalid(String),
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ServiceConfig = toml::from_str(text)?;
        cfg.search.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_toml(&text)
    }
}

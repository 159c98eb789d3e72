use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_TEMPERATURE: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    /// Answers from a cassette file; never touches the network.
    Replay,
    /// `POST <endpoint>` with a chat-completions body (OpenAI, DeepSeek,
    /// Together and other compatible hosts).
    OpenaiCompatible,
    /// `POST <endpoint>/models/<model>:generateContent`.
    Gemini,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetryPolicy {
    /// Attempts in total, so 1 means no retry.
    pub max_attempts: u32,
    /// Wait before the second attempt; doubles each time after.
    pub backoff_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_attempts: 3, backoff_ms: 500 }
    }
}

/// Settings for one backend. Credentials never live here: they are read
/// from the environment variable named by [`BackendConfig::credential_env`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendConfig {
    pub id: String,
    pub kind: BackendKind,
    #[serde(default)]
    pub endpoint: String,
    pub model: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default)]
    pub retry: RetryPolicy,
    /// Overrides `LOGICHINT_<ID>_KEY`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credential_var: Option<String>,
    /// Replay source, and the file a recording run writes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cassette: Option<PathBuf>,
    /// Most requests in flight at once.
    #[serde(default = "default_concurrency")]
    pub max_concurrent: usize,
    /// Token-bucket refill rate; `None` means unlimited.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub requests_per_minute: Option<f64>,
}

fn default_temperature() -> f64 {
    DEFAULT_TEMPERATURE
}
fn default_max_tokens() -> u32 {
    2048
}
fn default_timeout() -> f64 {
    60.0
}
fn default_concurrency() -> usize {
    4
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("temperature {0} is outside 0..=2")]
    Temperature(f64),
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("backend `{0}` needs an endpoint")]
    NoEndpoint(String),
    #[error("replay backend `{0}` needs a cassette path")]
    NoCassette(String),
    #[error("unknown preset `{0}` (expected one of {1})")]
    UnknownPreset(String, String),
    #[error("invalid backend config: {0}")]
    Toml(String),
}

/// Names accepted by [`BackendConfig::preset`].
pub const PRESETS: [&str; 5] = ["replay", "gpt-4o", "deepseek-v3", "llama-3-70b", "gemini-pro"];

impl BackendConfig {
    pub fn new(id: &str, kind: BackendKind, endpoint: &str, model: &str) -> BackendConfig {
        BackendConfig {
            id: id.to_string(),
            kind,
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            temperature: DEFAULT_TEMPERATURE,
            max_tokens: default_max_tokens(),
            timeout_secs: default_timeout(),
            retry: RetryPolicy::default(),
            credential_var: None,
            cassette: None,
            max_concurrent: default_concurrency(),
            requests_per_minute: None,
        }
    }

    /// A replay backend reading `cassette`, answering as `model`.
    pub fn replay(model: &str, cassette: impl Into<PathBuf>) -> BackendConfig {
        let mut cfg = BackendConfig::new("replay", BackendKind::Replay, "", model);
        cfg.cassette = Some(cassette.into());
        cfg
    }

    /// Ready-made settings for the hosted models this project targets.
    /// Endpoints follow each provider's API as of v1 of this crate.
    pub fn preset(name: &str) -> Result<BackendConfig, ConfigError> {
        use BackendKind::*;
        let cfg = match name {
            "replay" => BackendConfig::new("replay", Replay, "", "deepseek-v3"),
            "gpt-4o" => BackendConfig::new("openai", OpenaiCompatible, "https://api.openai.com/v1/chat/completions", "gpt-4o"),
            "deepseek-v3" => BackendConfig::new("deepseek", OpenaiCompatible, "https://api.deepseek.com/chat/completions", "deepseek-chat"),
            "llama-3-70b" => BackendConfig::new(
                "together",
                OpenaiCompatible,
                "https://api.together.xyz/v1/chat/completions",
                "meta-llama/Llama-3-70b-chat-hf",
            ),
            "gemini-pro" => BackendConfig::new("gemini", Gemini, "https://generativelanguage.googleapis.com/v1beta", "gemini-1.5-pro"),
            other => return Err(ConfigError::UnknownPreset(other.to_string(), PRESETS.join(", "))),
        };
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<BackendConfig, ConfigError> {
        let cfg: BackendConfig = toml::from_str(text).map_err(|e| ConfigError::Toml(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(ConfigError::Temperature(self.temperature));
        }
        if self.max_tokens == 0 {
            return Err(ConfigError::NotPositive("max_tokens"));
        }
        if self.timeout_secs.is_nan() || self.timeout_secs <= 0.0 {
            return Err(ConfigError::NotPositive("timeout_secs"));
        }
        if self.retry.max_attempts == 0 {
            return Err(ConfigError::NotPositive("retry.max_attempts"));
        }
        if self.max_concurrent == 0 {
            return Err(ConfigError::NotPositive("max_concurrent"));
        }
        if self.requests_per_minute.is_some_and(|r| r.is_nan() || r <= 0.0) {
            return Err(ConfigError::NotPositive("requests_per_minute"));
        }
        match self.kind {
            BackendKind::Replay if self.cassette.is_none() => Err(ConfigError::NoCassette(self.id.clone())),
            BackendKind::OpenaiCompatible | BackendKind::Gemini if self.endpoint.is_empty() => {
                Err(ConfigError::NoEndpoint(self.id.clone()))
            }
            _ => Ok(()),
        }
    }

    /// The environment variable holding the API key.
    pub fn credential_env(&self) -> String {
        self.credential_var.clone().unwrap_or_else(|| {
            let id: String = self
                .id
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '_' })
                .collect();
            format!("LOGICHINT_{id}_KEY")
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = BackendConfig::preset("deepseek-v3").unwrap();
        assert_eq!(cfg.temperature, 0.1);
        assert_eq!(cfg.credential_env(), "LOGICHINT_DEEPSEEK_KEY");
        assert!(cfg.validate().is_ok());
        assert_eq!(BackendConfig::preset("replay").unwrap().validate(), Err(ConfigError::NoCassette("replay".into())));
    }

    #[test]
    fn toml_round_trip() {
        let cfg = BackendConfig::from_toml("id = \"local\"\nkind = \"openai_compatible\"\nendpoint = \"http://x\"\nmodel = \"m\"\n[retry]\nmax_attempts = 1\n").unwrap();
        assert_eq!(cfg.temperature, DEFAULT_TEMPERATURE);
        assert_eq!(cfg.retry.max_attempts, 1);
        assert!(BackendConfig::from_toml("id = \"x\"\nkind = \"gemini\"\nmodel = \"m\"\napi_key = \"k\"\n").is_err());
    }

    #[test]
    fn rejects_bad_temperature() {
        let mut cfg = BackendConfig::preset("gpt-4o").unwrap();
        cfg.temperature = 2.5;
        assert_eq!(cfg.validate(), Err(ConfigError::Temperature(2.5)));
    }
}

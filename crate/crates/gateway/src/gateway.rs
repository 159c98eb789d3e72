use std::time::{Duration, Instant};

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use logichint_prompt::PromptBundle;

use crate::backend::{Backend, Replay, Request, Usage};
use crate::cassette::{Cassette, CassetteError};
use crate::config::{BackendConfig, BackendKind, ConfigError};
use crate::http::{Gemini, OpenAiCompatible};
use crate::limiter::Limiter;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Error)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CompletionError {
    #[error("request timed out")]
    Timeout,
    #[error("authentication failed (HTTP {status})")]
    Auth { status: u16 },
    #[error("rate limited by the backend")]
    RateLimited,
    #[error("backend returned HTTP {status}: {body}")]
    Http { status: u16, body: String },
    #[error("malformed backend response: {message}")]
    Malformed { message: String },
    #[error("transport error: {message}")]
    Transport { message: String },
    #[error("no recorded completion for request {hash}")]
    Miss { hash: String },
    #[error("environment variable {var} is not set")]
    NoCredential { var: String },
    #[error("{message}")]
    Unavailable { message: String },
}

impl CompletionError {
    pub fn is_retryable(&self) -> bool {
        match self {
            CompletionError::Timeout | CompletionError::RateLimited | CompletionError::Transport { .. } => true,
            CompletionError::Http { status, .. } => *status >= 500,
            _ => false,
        }
    }
}

/// The outcome of one request after retries: either text or an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Completion {
    pub request_hash: String,
    pub backend: String,
    pub model: String,
    /// Wall time over all attempts; zero for replayed answers.
    pub latency_ms: u64,
    pub attempts: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub usage: Option<Usage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<CompletionError>,
}

impl Completion {
    pub fn text(&self) -> Option<&str> {
        self.text.as_deref()
    }

    pub fn error(&self) -> Option<&CompletionError> {
        self.error.as_ref()
    }

    pub fn result(&self) -> Result<&str, &CompletionError> {
        match (&self.text, &self.error) {
            (Some(t), None) => Ok(t),
            (None, Some(e)) => Err(e),
            _ => unreachable!("a completion holds exactly one of text and error"),
        }
    }
}

/// Hex SHA-256 of the canonical JSON `{"model":..,"temperature":..,"prompt":..}`.
pub fn request_hash(model: &str, temperature: f64, prompt: &str) -> String {
    let canonical = serde_json::json!({ "model": model, "temperature": temperature, "prompt": prompt });
    hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
}

/// A configured backend with retries and rate limiting. Shareable across
/// threads.
pub struct Gateway {
    cfg: BackendConfig,
    backend: Box<dyn Backend>,
    limiter: Limiter,
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Cassette(#[from] CassetteError),
    #[error("environment variable {0} is not set")]
    NoCredential(String),
}

impl Gateway {
    pub fn new(cfg: BackendConfig, backend: impl Backend + 'static) -> Result<Gateway, ConfigError> {
        // An in-memory replay backend needs no cassette path.
        match cfg.validate() {
            Ok(()) | Err(ConfigError::NoCassette(_)) => {}
            Err(e) => return Err(e),
        }
        let limiter = Limiter::new(cfg.max_concurrent.max(1), cfg.requests_per_minute);
        Ok(Gateway { cfg, backend: Box::new(backend), limiter })
    }

    /// Builds the backend `cfg` names. Replay loads its cassette; HTTP
    /// backends read their key from the environment.
    pub fn from_config(cfg: BackendConfig) -> Result<Gateway, GatewayError> {
        cfg.validate()?;
        let key = || {
            let var = cfg.credential_env();
            std::env::var(&var).map_err(|_| GatewayError::NoCredential(var))
        };
        match cfg.kind {
            BackendKind::Replay => {
                let path = cfg.cassette.clone().expect("validated");
                let replay = Replay::new(Cassette::load(&path)?);
                Ok(Gateway::new(cfg, replay)?)
            }
            BackendKind::OpenaiCompatible => {
                let backend = OpenAiCompatible::new(&cfg, key()?);
                Ok(Gateway::new(cfg, backend)?)
            }
            BackendKind::Gemini => {
                let backend = Gemini::new(&cfg, key()?);
                Ok(Gateway::new(cfg, backend)?)
            }
        }
    }

    pub fn config(&self) -> &BackendConfig {
        &self.cfg
    }

    pub fn request(&self, bundle: &PromptBundle) -> Request {
        let prompt = bundle.text();
        Request {
            hash: request_hash(&self.cfg.model, self.cfg.temperature, &prompt),
            model: self.cfg.model.clone(),
            temperature: self.cfg.temperature,
            max_tokens: self.cfg.max_tokens,
            prompt,
            task: bundle.task,
            strategy: bundle.strategy,
        }
    }

    pub fn complete(&self, bundle: &PromptBundle) -> Completion {
        self.send(&self.request(bundle))
    }

    /// Completes every bundle, up to `max_concurrent` at a time. Results come
    /// back in input order.
    pub fn complete_all(&self, bundles: &[PromptBundle]) -> Vec<Completion> {
        let requests: Vec<Request> = bundles.iter().map(|b| self.request(b)).collect();
        if !self.backend.is_remote() || requests.len() < 2 {
            return requests.iter().map(|r| self.send(r)).collect();
        }
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots: Vec<parking_lot::Mutex<Option<Completion>>> =
            requests.iter().map(|_| parking_lot::Mutex::new(None)).collect();
        std::thread::scope(|scope| {
            for _ in 0..self.cfg.max_concurrent.min(requests.len()) {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                    let Some(r) = requests.get(i) else { break };
                    *slots[i].lock() = Some(self.send(r));
                });
            }
        });
        slots.into_iter().map(|s| s.into_inner().expect("every slot filled")).collect()
    }

    fn send(&self, request: &Request) -> Completion {
        let remote = self.backend.is_remote();
        let start = Instant::now();
        let mut attempts = 0;
        let outcome = loop {
            attempts += 1;
            let result = if remote {
                let _permit = self.limiter.acquire();
                self.backend.call(request)
            } else {
                self.backend.call(request)
            };
            match result {
                Err(e) if e.is_retryable() && attempts < self.cfg.retry.max_attempts => {
                    let wait = self.cfg.retry.backoff_ms.saturating_mul(1 << (attempts - 1).min(16));
                    std::thread::sleep(Duration::from_millis(wait));
                }
                other => break other,
            }
        };
        let latency_ms = if remote { start.elapsed().as_millis() as u64 } else { 0 };
        let (text, usage, error) = match outcome {
            Ok(reply) => (Some(reply.text), reply.usage, None),
            Err(e) => (None, None, Some(e)),
        };
        Completion {
            request_hash: request.hash.clone(),
            backend: self.cfg.id.clone(),
            model: self.cfg.model.clone(),
            latency_ms,
            attempts,
            usage,
            text,
            error,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable() {
        // Frozen from Python hashlib: sha256 of {"model":"m","temperature":0.1,"prompt":"p"}.
        assert_eq!(
            request_hash("m", 0.1, "p"),
            "a941d883e8bf3b09e4767d9352fe7467bf367cd3129d80863e2a90baf4b5d2e5"
        );
        assert_ne!(request_hash("m", 0.2, "p"), request_hash("m", 0.1, "p"));
    }
}

//! One interface over language-model backends: HTTP adapters for
//! OpenAI-style chat APIs and Gemini, plus a replay backend that answers from
//! a recorded cassette so tests and evaluations run offline.

mod backend;
mod cassette;
mod config;
mod gateway;
mod http;
mod limiter;

pub use backend::{Backend, Recorder, Replay, Reply, Request, Usage};
pub use cassette::{Cassette, CassetteError, Entry};
pub use config::{BackendConfig, BackendKind, ConfigError, RetryPolicy, DEFAULT_TEMPERATURE, PRESETS};
pub use gateway::{request_hash, Completion, CompletionError, Gateway, GatewayError};
pub use http::{Gemini, OpenAiCompatible};
pub use limiter::{Limiter, Permit};

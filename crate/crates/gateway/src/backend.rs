use parking_lot::Mutex;

use logichint_prompt::{Strategy, Task};

use crate::cassette::{Cassette, Entry};
use crate::gateway::CompletionError;

/// What a backend is asked.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub hash: String,
    pub model: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub prompt: String,
    pub task: Task,
    pub strategy: Strategy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub text: String,
    pub usage: Option<Usage>,
}

/// One attempt at one request. Retrying and rate limiting happen in
/// [`crate::Gateway`].
pub trait Backend: Send + Sync {
    fn call(&self, request: &Request) -> Result<Reply, CompletionError>;

    /// Whether calls cost time or money, so rate limits and retries apply.
    fn is_remote(&self) -> bool {
        true
    }
}

impl<B: Backend + ?Sized> Backend for std::sync::Arc<B> {
    fn call(&self, request: &Request) -> Result<Reply, CompletionError> {
        (**self).call(request)
    }

    fn is_remote(&self) -> bool {
        (**self).is_remote()
    }
}

/// Answers from a cassette, keyed by request hash.
#[derive(Debug, Clone)]
pub struct Replay {
    cassette: Cassette,
}

impl Replay {
    pub fn new(cassette: Cassette) -> Replay {
        Replay { cassette }
    }
}

impl Backend for Replay {
    fn call(&self, request: &Request) -> Result<Reply, CompletionError> {
        self.cassette
            .get(&request.hash)
            .map(|e| Reply { text: e.text.clone(), usage: None })
            .ok_or_else(|| CompletionError::Miss { hash: request.hash.clone() })
    }

    fn is_remote(&self) -> bool {
        false
    }
}

/// Passes calls through to `inner` and keeps every successful reply so the
/// run can be saved as a cassette.
pub struct Recorder<B> {
    inner: B,
    recorded: Mutex<Cassette>,
}

impl<B: Backend> Recorder<B> {
    pub fn new(inner: B) -> Recorder<B> {
        Recorder { inner, recorded: Mutex::new(Cassette::default()) }
    }

    pub fn cassette(&self) -> Cassette {
        self.recorded.lock().clone()
    }
}

impl<B: Backend> Backend for Recorder<B> {
    fn call(&self, request: &Request) -> Result<Reply, CompletionError> {
        let reply = self.inner.call(request)?;
        self.recorded.lock().insert(Entry::new(request, &reply.text));
        Ok(reply)
    }

    fn is_remote(&self) -> bool {
        self.inner.is_remote()
    }
}

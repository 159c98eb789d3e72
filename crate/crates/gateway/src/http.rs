//! HTTP adapters. Request and response shapes follow the OpenAI chat
//! completions API and the Gemini `generateContent` API (v1beta).

use std::time::Duration;

use serde_json::{json, Value};

use crate::backend::{Backend, Reply, Request, Usage};
use crate::config::BackendConfig;
use crate::gateway::CompletionError;

fn agent(cfg: &BackendConfig) -> ureq::Agent {
    ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs_f64(cfg.timeout_secs)))
        .http_status_as_error(false)
        .build()
        .into()
}

fn transport(e: ureq::Error) -> CompletionError {
    match e {
        ureq::Error::Timeout(_) => CompletionError::Timeout,
        other => CompletionError::Transport { message: other.to_string() },
    }
}

fn post(agent: &ureq::Agent, url: &str, auth: (&str, &str), body: &Value) -> Result<Value, CompletionError> {
    let mut response = agent.post(url).header(auth.0, auth.1).send_json(body).map_err(transport)?;
    let status = response.status().as_u16();
    let text = response.body_mut().read_to_string().map_err(transport)?;
    match status {
        200..=299 => serde_json::from_str(&text).map_err(|e| CompletionError::Malformed { message: e.to_string() }),
        401 | 403 => Err(CompletionError::Auth { status }),
        429 => Err(CompletionError::RateLimited),
        _ => Err(CompletionError::Http { status, body: text.chars().take(500).collect() }),
    }
}

fn malformed(what: &str) -> CompletionError {
    CompletionError::Malformed { message: format!("missing {what}") }
}

pub struct OpenAiCompatible {
    agent: ureq::Agent,
    endpoint: String,
    bearer: String,
}

impl OpenAiCompatible {
    pub fn new(cfg: &BackendConfig, key: String) -> OpenAiCompatible {
        OpenAiCompatible { agent: agent(cfg), endpoint: cfg.endpoint.clone(), bearer: format!("Bearer {key}") }
    }
}

impl Backend for OpenAiCompatible {
    fn call(&self, request: &Request) -> Result<Reply, CompletionError> {
        let body = json!({
            "model": request.model,
            "messages": [{ "role": "user", "content": request.prompt }],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        });
        let value = post(&self.agent, &self.endpoint, ("Authorization", &self.bearer), &body)?;
        let text = value
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| malformed("choices[0].message.content"))?;
        let usage = value.get("usage").map(|u| Usage {
            prompt_tokens: u["prompt_tokens"].as_u64().unwrap_or(0),
            completion_tokens: u["completion_tokens"].as_u64().unwrap_or(0),
        });
        Ok(Reply { text: text.to_string(), usage })
    }
}

pub struct Gemini {
    agent: ureq::Agent,
    url: String,
    key: String,
}

impl Gemini {
    pub fn new(cfg: &BackendConfig, key: String) -> Gemini {
        let url = format!("{}/models/{}:generateContent", cfg.endpoint.trim_end_matches('/'), cfg.model);
        Gemini { agent: agent(cfg), url, key }
    }
}

impl Backend for Gemini {
    fn call(&self, request: &Request) -> Result<Reply, CompletionError> {
        let body = json!({
            "contents": [{ "role": "user", "parts": [{ "text": request.prompt }] }],
            "generationConfig": { "temperature": request.temperature, "maxOutputTokens": request.max_tokens },
        });
        let value = post(&self.agent, &self.url, ("x-goog-api-key", &self.key), &body)?;
        let parts = value
            .pointer("/candidates/0/content/parts")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed("candidates[0].content.parts"))?;
        let text: String = parts.iter().filter_map(|p| p["text"].as_str()).collect();
        let usage = value.get("usageMetadata").map(|u| Usage {
            prompt_tokens: u["promptTokenCount"].as_u64().unwrap_or(0),
            completion_tokens: u["candidatesTokenCount"].as_u64().unwrap_or(0),
        });
        Ok(Reply { text, usage })
    }
}

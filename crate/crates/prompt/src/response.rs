//! Pulling structured answers out of free-form model output. Failures are
//! reported in the result, never as errors.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use logichint_core::kernel::{Hint, ProofMode, ProofStep};

use crate::rubric::RubricScores;
use crate::strategy::Task;

/// The first JSON object or array in `raw`. Fenced code blocks are tried
/// first, in order; then the text is scanned for the first `{` or `[` that
/// starts a complete JSON value.
pub fn extract_json(raw: &str) -> Option<Value> {
    let mut rest = raw;
    while let Some(open) = rest.find("```") {
        let after = &rest[open + 3..];
        let Some(close) = after.find("```") else { break };
        let block = &after[..close];
        // Drop an info string such as `json` on the opening line.
        let body = block.split_once('\n').map_or(block, |(_, b)| b);
        for candidate in [body, block] {
            if let Ok(v @ (Value::Object(_) | Value::Array(_))) = serde_json::from_str::<Value>(candidate.trim()) {
                return Some(v);
            }
        }
        rest = &after[close + 3..];
    }
    raw.char_indices().filter(|(_, c)| *c == '{' || *c == '[').find_map(|(i, _)| {
        let mut stream = serde_json::Deserializer::from_str(&raw[i..]).into_iter::<Value>();
        match stream.next() {
            Some(Ok(v @ (Value::Object(_) | Value::Array(_)))) => Some(v),
            _ => None,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofResponse {
    pub raw: String,
    pub steps: Vec<ProofStep>,
    pub mode: ProofMode,
    pub parse_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HintResponse {
    pub raw: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hint: Option<Hint>,
    pub parse_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RubricResponse {
    pub raw: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scores: Option<RubricScores>,
    pub parse_ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Response {
    Proof(ProofResponse),
    Hint(HintResponse),
    Rubric(RubricResponse),
}

pub fn parse_response(raw: &str, task: Task) -> Response {
    match task {
        Task::Prove => Response::Proof(parse_proof(raw)),
        Task::Hint => Response::Hint(parse_hint(raw)),
        Task::Grade => Response::Rubric(parse_rubric(raw)),
    }
}

const NO_JSON: &str = "no JSON object or array found";

/// Accepts `{"steps": [...], "mode": ...}` or a bare list of steps. Steps
/// are renumbered by position.
pub fn parse_proof(raw: &str) -> ProofResponse {
    let fail = |error: String| ProofResponse {
        raw: raw.to_string(),
        steps: Vec::new(),
        mode: ProofMode::Direct,
        parse_ok: false,
        error: Some(error),
    };
    let Some(value) = extract_json(raw) else { return fail(NO_JSON.into()) };
    let (list, mode) = match value {
        Value::Array(list) => (list, ProofMode::Direct),
        Value::Object(mut obj) => {
            let mode = match obj.remove("mode") {
                None | Some(Value::Null) => ProofMode::Direct,
                Some(m) => match serde_json::from_value(m) {
                    Ok(mode) => mode,
                    Err(e) => return fail(format!("mode: {e}")),
                },
            };
            match obj.remove("steps") {
                Some(Value::Array(list)) => (list, mode),
                _ => return fail("expected a `steps` list".into()),
            }
        }
        _ => unreachable!("extract_json returns objects or arrays"),
    };
    if list.is_empty() {
        return fail("the proof has no steps".into());
    }
    let mut steps = Vec::with_capacity(list.len());
    for (i, v) in list.into_iter().enumerate() {
        match serde_json::from_value::<ProofStep>(v) {
            Ok(mut step) => {
                step.index = i + 1;
                steps.push(step);
            }
            Err(e) => return fail(format!("step {}: {e}", i + 1)),
        }
    }
    ProofResponse { raw: raw.to_string(), steps, mode, parse_ok: true, error: None }
}

#[derive(Deserialize)]
struct FlatHint {
    #[serde(flatten)]
    step: ProofStep,
    #[serde(default)]
    explanation: Option<String>,
}

/// Accepts `{"step": {...}, "explanation": "..."}` or the step's fields
/// with `explanation` beside them.
pub fn parse_hint(raw: &str) -> HintResponse {
    let fail = |error: String| HintResponse { raw: raw.to_string(), hint: None, parse_ok: false, error: Some(error) };
    let Some(value) = extract_json(raw) else { return fail(NO_JSON.into()) };
    let parsed = if value.get("step").is_some() {
        serde_json::from_value::<Hint>(value)
    } else {
        serde_json::from_value::<FlatHint>(value).map(|f| Hint { step: f.step, explanation: f.explanation })
    };
    match parsed {
        Ok(hint) => HintResponse { raw: raw.to_string(), hint: Some(hint), parse_ok: true, error: None },
        Err(e) => fail(e.to_string()),
    }
}

/// Four integer scores on the 1 to 4 scale.
pub fn parse_rubric(raw: &str) -> RubricResponse {
    parse_rubric_scaled(raw, 1, 4)
}

pub fn parse_rubric_scaled(raw: &str, min: u8, max: u8) -> RubricResponse {
    let fail = |error: String| RubricResponse { raw: raw.to_string(), scores: None, parse_ok: false, error: Some(error) };
    let Some(value) = extract_json(raw) else { return fail(NO_JSON.into()) };
    match serde_json::from_value::<RubricScores>(value) {
        Ok(scores) => match scores.out_of_range(min, max) {
            Some(d) => fail(format!("{d} score {} is outside {min}..={max}", scores.get(d))),
            None => RubricResponse { raw: raw.to_string(), scores: Some(scores), parse_ok: true, error: None },
        },
        Err(e) => fail(e.to_string()),
    }
}

//! Versioned JSON documents: a `"schema"` tag next to the body's fields.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::model::{Problem, ProofStep, SCHEMA};

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("document has no \"schema\" tag")]
    MissingSchema,
    #[error("unsupported schema `{0}` (expected `{SCHEMA}`)")]
    UnsupportedSchema(String),
    #[error("document body must be a JSON object")]
    NotAnObject,
}

/// Serializes `body` (which must serialize as an object) with the schema tag
/// first.
pub fn to_document<T: Serialize>(body: &T) -> serde_json::Value {
    let value = serde_json::to_value(body).expect("document bodies serialize");
    let serde_json::Value::Object(fields) = value else {
        panic!("document bodies serialize as objects");
    };
    let mut out = serde_json::Map::new();
    out.insert("schema".into(), SCHEMA.into());
    out.extend(fields);
    serde_json::Value::Object(out)
}

pub fn to_document_string<T: Serialize>(body: &T) -> String {
    let mut text = serde_json::to_string_pretty(&to_document(body)).expect("values serialize");
    text.push('\n');
    text
}

/// Parses a document, checking the schema tag before the body.
pub fn from_document<T: DeserializeOwned>(text: &str) -> Result<T, DocumentError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    from_document_value(value)
}

pub fn from_document_value<T: DeserializeOwned>(value: serde_json::Value) -> Result<T, DocumentError> {
    let serde_json::Value::Object(mut fields) = value else {
        return Err(DocumentError::NotAnObject);
    };
    match fields.remove("schema") {
        Some(serde_json::Value::String(s)) if s == SCHEMA => {}
        Some(serde_json::Value::String(s)) => return Err(DocumentError::UnsupportedSchema(s)),
        Some(other) => return Err(DocumentError::UnsupportedSchema(other.to_string())),
        None => return Err(DocumentError::MissingSchema),
    }
    Ok(serde_json::from_value(serde_json::Value::Object(fields))?)
}

/// A collection of problems, looked up by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemSet {
    pub problems: Vec<Problem>,
}

impl ProblemSet {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        from_document(text)
    }

    pub fn get(&self, id: &str) -> Option<&Problem> {
        self.problems.iter().find(|p| p.id == id)
    }
}

/// A reference derivation for one problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub problem: String,
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
}

impl SolutionSet {
    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        from_document(text)
    }

    pub fn get(&self, problem: &str) -> Option<&Solution> {
        self.solutions.iter().find(|s| s.problem == problem)
    }
}

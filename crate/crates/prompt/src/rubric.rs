use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four rated qualities of a hint explanation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Consistency,
    Clarity,
    Justification,
    Subgoaling,
}

impl Dimension {
    pub const ALL: [Dimension; 4] =
        [Dimension::Consistency, Dimension::Clarity, Dimension::Justification, Dimension::Subgoaling];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Consistency => "consistency",
            Dimension::Clarity => "clarity",
            Dimension::Justification => "justification",
            Dimension::Subgoaling => "subgoaling",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dimension {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown rubric dimension `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: Dimension,
    pub definition: String,
}

#[derive(Debug, Error)]
pub enum RubricError {
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("scale {0}..{1} is empty")]
    Scale(u8, u8),
    #[error("criteria must be exactly consistency, clarity, justification, subgoaling in that order")]
    Criteria,
}

/// Criteria and scale, read from configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rubric {
    pub min: u8,
    pub max: u8,
    #[serde(rename = "criterion")]
    pub criteria: Vec<Criterion>,
}

impl Rubric {
    pub fn from_toml(text: &str) -> Result<Rubric, RubricError> {
        let rubric: Rubric = toml::from_str(text)?;
        if rubric.min >= rubric.max {
            return Err(RubricError::Scale(rubric.min, rubric.max));
        }
        let names: Vec<Dimension> = rubric.criteria.iter().map(|c| c.name).collect();
        if names != Dimension::ALL {
            return Err(RubricError::Criteria);
        }
        Ok(rubric)
    }
}

/// One rater's scores for one explanation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RubricScores {
    pub consistency: u8,
    pub clarity: u8,
    pub justification: u8,
    pub subgoaling: u8,
}

impl RubricScores {
    pub fn get(&self, d: Dimension) -> u8 {
        match d {
            Dimension::Consistency => self.consistency,
            Dimension::Clarity => self.clarity,
            Dimension::Justification => self.justification,
            Dimension::Subgoaling => self.subgoaling,
        }
    }

    /// The first dimension outside `min..=max`, if any.
    pub fn out_of_range(&self, min: u8, max: u8) -> Option<Dimension> {
        Dimension::ALL.into_iter().find(|&d| !(min..=max).contains(&self.get(d)))
    }
}

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use logichint_core::kernel::ProblemSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Source of few-shot examples only.
    Training,
    Validation,
    Test,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Training => "training",
            Role::Validation => "validation",
            Role::Test => "test",
        })
    }
}

#[derive(Debug, Error)]
pub enum SplitError {
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error("problem `{id}` is in both {first} and {second}")]
    Overlap { id: String, first: Role, second: Role },
    #[error("problem `{0}` is not in the problem set")]
    Unknown(String),
}

/// Which problems are training, validation and test.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    #[serde(default)]
    pub training: Vec<String>,
    #[serde(default)]
    pub validation: Vec<String>,
    #[serde(default)]
    pub test: Vec<String>,
}

const BUILTIN: &str = include_str!("../../../data/splits/lt20.toml");

impl SplitConfig {
    /// The split of the bundled problem set.
    pub fn builtin() -> SplitConfig {
        SplitConfig::from_toml(BUILTIN).expect("bundled split is valid")
    }

    pub fn from_toml(text: &str) -> Result<SplitConfig, SplitError> {
        let split: SplitConfig = toml::from_str(text)?;
        split.roles()?;
        Ok(split)
    }

    fn roles(&self) -> Result<BTreeMap<&str, Role>, SplitError> {
        let mut roles = BTreeMap::new();
        for (role, ids) in [(Role::Training, &self.training), (Role::Validation, &self.validation), (Role::Test, &self.test)] {
            for id in ids {
                if let Some(first) = roles.insert(id.as_str(), role) {
                    return Err(SplitError::Overlap { id: id.clone(), first, second: role });
                }
            }
        }
        Ok(roles)
    }

    pub fn role_of(&self, id: &str) -> Option<Role> {
        self.roles().ok()?.get(id).copied()
    }

    pub fn ids(&self, role: Role) -> &[String] {
        match role {
            Role::Training => &self.training,
            Role::Validation => &self.validation,
            Role::Test => &self.test,
        }
    }

    /// Every assigned id must name a problem in `problems`.
    pub fn check_against(&self, problems: &ProblemSet) -> Result<(), SplitError> {
        self.roles()?;
        for id in self.training.iter().chain(&self.validation).chain(&self.test) {
            if problems.get(id).is_none() {
                return Err(SplitError::Unknown(id.clone()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_split_covers_the_bundled_set() {
        let split = SplitConfig::builtin();
        let problems = logichint_core::data::lt20();
        split.check_against(&problems).unwrap();
        assert_eq!((split.training.len(), split.validation.len(), split.test.len()), (4, 6, 10));
        assert_eq!(split.training.len() + split.validation.len() + split.test.len(), problems.problems.len());
    }

    #[test]
    fn overlap_is_rejected() {
        let err = SplitConfig::from_toml("training = [\"a\"]\ntest = [\"b\", \"a\"]").unwrap_err();
        assert_eq!(err.to_string(), "problem `a` is in both training and test");
    }
}

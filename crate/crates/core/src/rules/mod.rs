//! Inference and replacement rules.
//!
//! Inference rules consume whole statements; replacement rules rewrite one
//! subformula (addressed by a [`Site`]) into an equivalent one and may be used
//! in either direction. Schema metavariables bind arbitrary subtrees. There is
//! no implicit commutativity: `DS` needs the negated disjunct on the left and
//! `Simp` yields the left conjunct. Parent order is free, though, because step
//! lists written by students and models do not encode it.
//!
//! | rule   | kind        | schema                                          |
//! |--------|-------------|-------------------------------------------------|
//! | MP     | inference   | `p -> q`, `p` / `q`                             |
//! | MT     | inference   | `p -> q`, `~q` / `~p`                           |
//! | DS     | inference   | `p | q`, `~p` / `q`                             |
//! | HS     | inference   | `p -> q`, `q -> r` / `p -> r`                   |
//! | Simp   | inference   | `p & q` / `p`                                   |
//! | Conj   | inference   | `p`, `q` / `p & q`                              |
//! | Add    | inference   | `p` / `p | q` or `q | p`                        |
//! | CD     | inference   | `p -> q`, `r -> s`, `p | r` / `q | s`           |
//! | Contra | inference   | `p`, `~p` / `0`                                 |
//! | Com    | replacement | `p | q` = `q | p`, `p & q` = `q & p`            |
//! | DeM    | replacement | `~(p & q)` = `~p | ~q`, `~(p | q)` = `~p & ~q`  |
//! | Impl   | replacement | `p -> q` = `~p | q`                             |
//! | DN     | replacement | `~~p` = `p`                                     |
//! | CP     | replacement | `p -> q` = `~q -> ~p`                           |
//!
//! `Contra` only runs forward: nothing is derived from `0`.

mod enumerate;
pub mod schema;
mod validate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Site};

pub use enumerate::{enumerate_applications, EnumContext, EnumLimits, Enumeration};
pub use validate::{validate_application, Diagnosis, Judgement, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleId {
    MP,
    MT,
    DS,
    HS,
    Simp,
    Conj,
    Add,
    CD,
    Com,
    DeM,
    Impl,
    DN,
    CP,
    Contra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Inference,
    Replacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Backward];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }

    pub fn reversed(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            other => Err(format!("unknown direction `{other}`")),
        }
    }
}

impl RuleId {
    /// Canonical order; enumeration and tie-breaking follow it.
    pub const ALL: [RuleId; 14] = [
        RuleId::MP,
        RuleId::MT,
        RuleId::DS,
        RuleId::HS,
        RuleId::Simp,
        RuleId::Conj,
        RuleId::Add,
        RuleId::CD,
        RuleId::Com,
        RuleId::DeM,
        RuleId::Impl,
        RuleId::DN,
        RuleId::CP,
        RuleId::Contra,
    ];

    pub fn kind(self) -> RuleKind {
        match self {
            RuleId::Com | RuleId::DeM | RuleId::Impl | RuleId::DN | RuleId::CP => {
                RuleKind::Replacement
            }
            _ => RuleKind::Inference,
        }
    }

    pub fn is_replacement(self) -> bool {
        self.kind() == RuleKind::Replacement
    }

    /// Number of parent statements the rule consumes.
    pub fn arity(self) -> usize {
        match self {
            RuleId::CD => 3,
            RuleId::MP | RuleId::MT | RuleId::DS | RuleId::HS | RuleId::Conj | RuleId::Contra => 2,
            _ => 1,
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            RuleId::MP => "MP",
            RuleId::MT => "MT",
            RuleId::DS => "DS",
            RuleId::HS => "HS",
            RuleId::Simp => "Simp",
            RuleId::Conj => "Conj",
            RuleId::Add => "Add",
            RuleId::CD => "CD",
            RuleId::Com => "Com",
            RuleId::DeM => "DeM",
            RuleId::Impl => "Impl",
            RuleId::DN => "DN",
            RuleId::CP => "CP",
            RuleId::Contra => "Contra",
        }
    }

    pub fn full_name(self) -> &'static str {
        match self {
            RuleId::MP => "Modus Ponens",
            RuleId::MT => "Modus Tollens",
            RuleId::DS => "Disjunctive Syllogism",
            RuleId::HS => "Hypothetical Syllogism",
            RuleId::Simp => "Simplification",
            RuleId::Conj => "Conjunction",
            RuleId::Add => "Addition",
            RuleId::CD => "Constructive Dilemma",
            RuleId::Com => "Commutation",
            RuleId::DeM => "De Morgan's",
            RuleId::Impl => "Implication",
            RuleId::DN => "Double Negation",
            RuleId::CP => "Contrapositive",
            RuleId::Contra => "Contradiction",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for RuleId {
    type Err = RuleError;

    /// Accepts the short names, case-insensitively, and the full names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        RuleId::ALL
            .into_iter()
            .find(|r| {
                r.short_name().eq_ignore_ascii_case(trimmed)
                    || r.full_name().eq_ignore_ascii_case(trimmed)
            })
            .ok_or_else(|| RuleError::UnknownRule(trimmed.to_string()))
    }
}

/// One use of a rule: parents, result and, for replacement rules, where and
/// which way the rewrite happened. `site`/`direction` may be left empty on a
/// replacement step; validation then searches every site and direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuleApplication {
    pub rule: RuleId,
    pub parents: Vec<Formula>,
    pub result: Formula,
    pub site: Option<Site>,
    pub direction: Option<Direction>,
}

impl RuleApplication {
    pub fn inference(rule: RuleId, parents: Vec<Formula>, result: Formula) -> Self {
        RuleApplication { rule, parents, result, site: None, direction: None }
    }

    pub fn replacement(
        rule: RuleId,
        parent: Formula,
        result: Formula,
        site: Site,
        direction: Direction,
    ) -> Self {
        RuleApplication {
            rule,
            parents: vec![parent],
            result,
            site: Some(site),
            direction: Some(direction),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("{rule} takes {expected} parent(s), got {found}")]
    ArityMismatch { rule: RuleId, expected: usize, found: usize },
    #[error("site {site:?} does not exist in `{formula}`")]
    InvalidSite { site: Site, formula: Formula },
    #[error("{0} is an inference rule and applies to whole statements only")]
    SiteOnInferenceRule(RuleId),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
}

/// Formats a site as dotted child indices; the root is `root`.
pub fn format_site(site: &[usize]) -> String {
    if site.is_empty() {
        "root".to_string()
    } else {
        site.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
    }
}

/// Parses the output of [`format_site`].
pub fn parse_site(text: &str) -> Option<Site> {
    if text == "root" {
        return Some(Vec::new());
    }
    text.split('.').map(|part| part.parse().ok()).collect()
}

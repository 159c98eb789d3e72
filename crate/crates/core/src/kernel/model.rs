//! Problems, proof steps, proofs and problem-solving states.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::formula::{Formula, Site};
use crate::rules::{Direction, RuleId};

/// Version tag carried by every JSON document this crate writes.
pub const SCHEMA: &str = "logichint/v1";

/// Section of the tutor a problem belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Pretest,
    Train1,
    Train2,
    Train3,
    Train4,
    Train5,
    Posttest,
}

impl Level {
    pub const ALL: [Level; 7] = [
        Level::Pretest,
        Level::Train1,
        Level::Train2,
        Level::Train3,
        Level::Train4,
        Level::Train5,
        Level::Posttest,
    ];

    /// Hints are only served in the training section.
    pub fn allows_hints(self) -> bool {
        !matches!(self, Level::Pretest | Level::Posttest)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Level::Pretest => "pretest",
            Level::Train1 => "train1",
            Level::Train2 => "train2",
            Level::Train3 => "train3",
            Level::Train4 => "train4",
            Level::Train5 => "train5",
            Level::Posttest => "posttest",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Level::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown level `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("problem `{0}` has no premises")]
    NoPremises(String),
    #[error("problem `{id}`: conclusion `{conclusion}` is already a premise")]
    ConclusionIsPremise { id: String, conclusion: Formula },
}

#[derive(Deserialize)]
struct RawProblem {
    id: String,
    premises: Vec<Formula>,
    conclusion: Formula,
    level: Level,
}

/// Premises, a conclusion to derive, and the tutor level.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawProblem")]
pub struct Problem {
    pub id: String,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub level: Level,
}

impl TryFrom<RawProblem> for Problem {
    type Error = ProblemError;

    fn try_from(raw: RawProblem) -> Result<Self, Self::Error> {
        Problem::new(raw.id, raw.premises, raw.conclusion, raw.level)
    }
}

impl Problem {
    pub fn new(
        id: impl Into<String>,
        premises: Vec<Formula>,
        conclusion: Formula,
        level: Level,
    ) -> Result<Problem, ProblemError> {
        let id = id.into();
        if premises.is_empty() {
            return Err(ProblemError::NoPremises(id));
        }
        if premises.contains(&conclusion) {
            return Err(ProblemError::ConclusionIsPremise { id, conclusion });
        }
        Ok(Problem { id, premises, conclusion, level })
    }

    /// Atoms of premises and conclusion.
    pub fn signature(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        for f in self.premises.iter().chain(std::iter::once(&self.conclusion)) {
            out.extend(f.atoms().into_iter().map(str::to_owned));
        }
        out
    }

    pub fn premise(&self, number: usize) -> Option<&Formula> {
        number.checked_sub(1).and_then(|i| self.premises.get(i))
    }
}

/// Reference to an earlier statement: premise `P<n>` or derived step `S<n>`,
/// both 1-based. `S0` names the assumption of an indirect proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepRef {
    Premise(usize),
    Step(usize),
}

impl fmt::Display for StepRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepRef::Premise(n) => write!(f, "P{n}"),
            StepRef::Step(n) => write!(f, "S{n}"),
        }
    }
}

impl FromStr for StepRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || format!("bad statement reference `{s}` (expected P<n> or S<n>)");
        let (kind, digits) = s.split_at_checked(1).ok_or_else(bad)?;
        let n: usize = digits.parse().map_err(|_| bad())?;
        match kind {
            "P" | "p" if n >= 1 => Ok(StepRef::Premise(n)),
            "S" | "s" => Ok(StepRef::Step(n)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for StepRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StepRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// One justified line of a derivation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProofStep {
    /// 1-based position. Informational: references resolve by position.
    #[serde(default)]
    pub index: usize,
    pub formula: Formula,
    pub rule: RuleId,
    pub parents: Vec<StepRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<Site>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
}

impl ProofStep {
    pub fn new(index: usize, formula: Formula, rule: RuleId, parents: Vec<StepRef>) -> Self {
        ProofStep { index, formula, rule, parents, site: None, direction: None }
    }

    /// Same step ignoring its position.
    pub fn same_content(&self, other: &ProofStep) -> bool {
        self.formula == other.formula
            && self.rule == other.rule
            && self.parents == other.parents
            && self.site == other.site
            && self.direction == other.direction
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProofMode {
    #[default]
    Direct,
    /// Assume `~conclusion` (referenced as `S0`) and derive `0`.
    Indirect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proof {
    pub problem: Problem,
    pub steps: Vec<ProofStep>,
    #[serde(default)]
    pub mode: ProofMode,
}

impl Proof {
    pub fn new(problem: Problem, steps: Vec<ProofStep>, mode: ProofMode) -> Self {
        Proof { problem, steps, mode }
    }

    /// The formula that completes the proof.
    pub fn goal(&self) -> Formula {
        match self.mode {
            ProofMode::Direct => self.problem.conclusion.clone(),
            ProofMode::Indirect => Formula::False,
        }
    }

    pub fn assumption(&self) -> Option<Formula> {
        match self.mode {
            ProofMode::Direct => None,
            ProofMode::Indirect => Some(Formula::not(self.problem.conclusion.clone())),
        }
    }
}

/// A snapshot of a student's partial proof.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pss {
    pub problem: Problem,
    pub derived: Vec<ProofStep>,
    /// Position of the snapshot in its source log (event count so far).
    #[serde(default)]
    pub order: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl Pss {
    pub fn new(problem: Problem, derived: Vec<ProofStep>) -> Self {
        Pss { problem, derived, order: 0, timestamp: None }
    }

    pub fn initial(problem: Problem) -> Self {
        Pss::new(problem, Vec::new())
    }

    /// The formula a reference points at, if it exists in this state.
    pub fn resolve(&self, r: StepRef) -> Option<&Formula> {
        match r {
            StepRef::Premise(n) => self.problem.premise(n),
            StepRef::Step(n) => n.checked_sub(1).and_then(|i| self.derived.get(i)).map(|s| &s.formula),
        }
    }

    /// True if `f` is a premise or an already-derived statement.
    pub fn contains(&self, f: &Formula) -> bool {
        self.problem.premises.contains(f) || self.derived.iter().any(|s| s.formula == *f)
    }

    pub fn is_solved(&self) -> bool {
        self.derived.iter().any(|s| s.formula == self.problem.conclusion)
    }

    /// 1-based indices of derived steps restating a premise or an earlier
    /// derived statement. Such steps are kept, only flagged.
    pub fn redundant_steps(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, step) in self.derived.iter().enumerate() {
            if self.problem.premises.contains(&step.formula)
                || self.derived[..i].iter().any(|s| s.formula == step.formula)
            {
                out.push(i + 1);
            }
        }
        out
    }

    /// A copy with `step` appended (renumbered to the next index).
    pub fn with_step(&self, step: &ProofStep) -> Pss {
        let mut next = self.clone();
        let mut step = step.clone();
        step.index = next.derived.len() + 1;
        next.derived.push(step);
        next
    }

    /// Checks every derived step against the statements before it.
    pub fn step_verdicts(&self) -> Vec<super::StepVerdict> {
        let proof = Proof::new(self.problem.clone(), self.derived.clone(), ProofMode::Direct);
        super::check_proof(&proof).verdicts
    }
}

/// A suggested next step, optionally with a conceptual explanation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hint {
    pub step: ProofStep,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<String>,
}

//! Proof kernel: step checking, whole-proof checking and hint validation.
//!
//! References resolve by position: `P<n>` is the n-th premise, `S<n>` the
//! n-th derived step, and `S0` the assumption `~conclusion` of an indirect
//! proof. A step may only cite statements that precede it.

mod document;
mod model;

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::formula::Formula;
use crate::rules::{validate_application, Diagnosis, Judgement, RuleApplication, RuleError};

pub use document::{
    from_document, from_document_value, to_document, to_document_string, DocumentError, ProblemSet,
    Solution, SolutionSet,
};
pub use model::{
    Hint, Level, Problem, ProblemError, Proof, ProofMode, ProofStep, Pss, StepRef, SCHEMA,
};

/// Why a step was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepError {
    /// A cited statement does not exist (yet).
    ParentNotDerived(StepRef),
    /// Wrong number of parents, or a site that is not in the parent.
    Rule(RuleError),
    /// Well-formed, but the result does not follow by the cited rule.
    Mismatch(Diagnosis),
}

impl StepError {
    pub fn kind(&self) -> &'static str {
        match self {
            StepError::ParentNotDerived(_) => "parent_not_derived",
            StepError::Rule(_) => "rule_error",
            StepError::Mismatch(_) => "schema_mismatch",
        }
    }
}

impl fmt::Display for StepError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepError::ParentNotDerived(r) => write!(f, "parent not derived: {r}"),
            StepError::Rule(e) => write!(f, "{e}"),
            StepError::Mismatch(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepVerdict {
    Valid,
    Invalid(StepError),
}

impl StepVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, StepVerdict::Valid)
    }

    pub fn error(&self) -> Option<&StepError> {
        match self {
            StepVerdict::Invalid(e) => Some(e),
            StepVerdict::Valid => None,
        }
    }
}

impl Serialize for StepVerdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            StepVerdict::Valid => {
                let mut s = serializer.serialize_struct("StepVerdict", 1)?;
                s.serialize_field("valid", &true)?;
                s.end()
            }
            StepVerdict::Invalid(e) => {
                let mut s = serializer.serialize_struct("StepVerdict", 3)?;
                s.serialize_field("valid", &false)?;
                s.serialize_field("reason", e.kind())?;
                s.serialize_field("message", &e.to_string())?;
                s.end()
            }
        }
    }
}

/// Statements visible to a step: premises, earlier steps, optional assumption.
struct Scope<'a> {
    premises: &'a [Formula],
    prior: Vec<&'a Formula>,
    assumption: Option<&'a Formula>,
}

impl<'a> Scope<'a> {
    fn resolve(&self, r: StepRef) -> Option<&'a Formula> {
        match r {
            StepRef::Premise(n) => n.checked_sub(1).and_then(|i| self.premises.get(i)),
            StepRef::Step(0) => self.assumption,
            StepRef::Step(n) => self.prior.get(n - 1).copied(),
        }
    }

    fn check(&self, step: &ProofStep) -> StepVerdict {
        let mut parents = Vec::with_capacity(step.parents.len());
        for &r in &step.parents {
            match self.resolve(r) {
                Some(f) => parents.push(f.clone()),
                None => return StepVerdict::Invalid(StepError::ParentNotDerived(r)),
            }
        }
        let app = RuleApplication {
            rule: step.rule,
            parents,
            result: step.formula.clone(),
            site: step.site.clone(),
            direction: step.direction,
        };
        match validate_application(&app) {
            Ok(Judgement::Valid(_)) => StepVerdict::Valid,
            Ok(Judgement::Invalid(d)) => StepVerdict::Invalid(StepError::Mismatch(d)),
            Err(e) => StepVerdict::Invalid(StepError::Rule(e)),
        }
    }
}

/// Checks `step` as the next line of `state`. Only local validity is judged:
/// the cited statements must exist and the rule must fit them.
pub fn check_step(state: &Pss, step: &ProofStep) -> StepVerdict {
    let scope = Scope {
        premises: &state.problem.premises,
        prior: state.derived.iter().map(|s| &s.formula).collect(),
        assumption: None,
    };
    scope.check(step)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofReport {
    pub verdicts: Vec<StepVerdict>,
    /// A valid step derives the goal and every step it depends on is valid.
    pub complete: bool,
    pub valid_steps: usize,
    pub total_steps: usize,
    /// `valid_steps / total_steps`; `None` for an empty proof.
    pub stepwise_accuracy: Option<f64>,
}

/// Checks each step against the premises and the steps before it.
pub fn check_proof(proof: &Proof) -> ProofReport {
    let assumption = proof.assumption();
    let goal = proof.goal();
    let mut verdicts = Vec::with_capacity(proof.steps.len());
    // sound[i]: step i is valid and so is everything it cites.
    let mut sound: Vec<bool> = Vec::with_capacity(proof.steps.len());
    for (i, step) in proof.steps.iter().enumerate() {
        let scope = Scope {
            premises: &proof.problem.premises,
            prior: proof.steps[..i].iter().map(|s| &s.formula).collect(),
            assumption: assumption.as_ref(),
        };
        let verdict = scope.check(step);
        let ok = verdict.is_valid()
            && step.parents.iter().all(|r| match r {
                StepRef::Step(n) if *n >= 1 => sound[n - 1],
                _ => true,
            });
        sound.push(ok);
        verdicts.push(verdict);
    }
    let complete = proof.steps.iter().zip(&sound).any(|(s, &ok)| ok && s.formula == goal);
    let valid_steps = verdicts.iter().filter(|v| v.is_valid()).count();
    let total_steps = verdicts.len();
    let stepwise_accuracy =
        (total_steps > 0).then(|| valid_steps as f64 / total_steps as f64);
    ProofReport { verdicts, complete, valid_steps, total_steps, stepwise_accuracy }
}

/// Why a hint was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HintError {
    /// Cites statements the student has not derived.
    MissingParents(Vec<StepRef>),
    /// The step does not follow by its rule.
    Illogical(StepError),
    /// Restates a premise or an already-derived statement.
    Duplicate,
}

impl HintError {
    pub fn kind(&self) -> &'static str {
        match self {
            HintError::MissingParents(_) => "missing_parents",
            HintError::Illogical(_) => "illogical",
            HintError::Duplicate => "duplicate",
        }
    }
}

impl fmt::Display for HintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HintError::MissingParents(refs) => {
                let list: Vec<String> = refs.iter().map(StepRef::to_string).collect();
                write!(f, "missing parents: {}", list.join(", "))
            }
            HintError::Illogical(e) => write!(f, "illogical: {e}"),
            HintError::Duplicate => f.write_str("duplicate of a known statement"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HintVerdict {
    Correct,
    Incorrect(HintError),
}

impl HintVerdict {
    pub fn is_correct(&self) -> bool {
        matches!(self, HintVerdict::Correct)
    }

    /// `"correct"` or the error kind.
    pub fn label(&self) -> &'static str {
        match self {
            HintVerdict::Correct => "correct",
            HintVerdict::Incorrect(e) => e.kind(),
        }
    }
}

impl Serialize for HintVerdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("HintVerdict", 3)?;
        s.serialize_field("correct", &self.is_correct())?;
        match self {
            HintVerdict::Correct => {
                s.skip_field("reason")?;
                s.skip_field("message")?;
            }
            HintVerdict::Incorrect(e) => {
                s.serialize_field("reason", e.kind())?;
                s.serialize_field("message", &e.to_string())?;
            }
        }
        s.end()
    }
}

/// Judges a suggested next step. Checks run in a fixed order and the first
/// failure is reported: missing parents, then logical validity, then
/// duplication.
pub fn validate_hint(state: &Pss, hint: &ProofStep) -> HintVerdict {
    let missing: Vec<StepRef> =
        hint.parents.iter().copied().filter(|r| state.resolve(*r).is_none()).collect();
    if !missing.is_empty() {
        return HintVerdict::Incorrect(HintError::MissingParents(missing));
    }
    if let StepVerdict::Invalid(e) = check_step(state, hint) {
        return HintVerdict::Incorrect(HintError::Illogical(e));
    }
    if state.contains(&hint.formula) {
        return HintVerdict::Incorrect(HintError::Duplicate);
    }
    HintVerdict::Correct
}

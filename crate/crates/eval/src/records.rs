//! Per-step and per-hint records and the tables built from them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use logichint_core::formula::Formula;
use logichint_core::kernel::{HintVerdict, Level, ProofStep, Pss, StepRef, StepVerdict};
use logichint_core::rules::RuleId;
use logichint_prompt::{Strategy, Task};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One judged step of a generated proof, or one judged hint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRecord {
    /// `<problem>#S<n>` for proof steps, `<problem>@<order>` for hints.
    pub id: String,
    pub problem: String,
    pub level: Level,
    pub strategy: Strategy,
    pub backend: String,
    pub task: Task,
    pub step: ProofStep,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<String>,
    pub correct: bool,
    /// Error kind when incorrect.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub rule: RuleId,
    /// Total node count of the cited formulas that exist.
    pub parent_length_sum: usize,
}

/// Where a record came from, shared by every record of one response.
#[derive(Debug, Clone)]
pub struct Origin<'a> {
    pub problem: &'a str,
    pub level: Level,
    pub strategy: Strategy,
    pub backend: &'a str,
}

impl EvalRecord {
    fn base(origin: &Origin<'_>, id: String, task: Task, step: &ProofStep, parent_length_sum: usize) -> Self {
        EvalRecord {
            id,
            problem: origin.problem.to_owned(),
            level: origin.level,
            strategy: origin.strategy,
            backend: origin.backend.to_owned(),
            task,
            step: step.clone(),
            explanation: None,
            correct: false,
            reason: None,
            rule: step.rule,
            parent_length_sum,
        }
    }

    /// A proof step judged by the step checker.
    pub fn from_step(origin: &Origin<'_>, step: &ProofStep, verdict: &StepVerdict, parents: &[Option<&Formula>]) -> Self {
        let id = format!("{}#S{}", origin.problem, step.index);
        let mut r = Self::base(origin, id, Task::Prove, step, length_sum(parents));
        r.correct = verdict.is_valid();
        r.reason = verdict.error().map(|e| e.kind().to_owned());
        r
    }

    /// A hint judged against the state it was requested for.
    pub fn from_hint(origin: &Origin<'_>, state: &Pss, step: &ProofStep, explanation: Option<String>, verdict: &HintVerdict) -> Self {
        let id = format!("{}@{}", origin.problem, state.order);
        let parents: Vec<Option<&Formula>> = step.parents.iter().map(|&r| state.resolve(r)).collect();
        let mut r = Self::base(origin, id, Task::Hint, step, length_sum(&parents));
        r.explanation = explanation;
        r.correct = verdict.is_correct();
        r.reason = (!r.correct).then(|| verdict.label().to_owned());
        r
    }
}

fn length_sum(parents: &[Option<&Formula>]) -> usize {
    parents.iter().flatten().map(|f| f.len()).sum()
}

/// Resolves the parents of `steps[i]` within a proof: premises, earlier
/// steps and the indirect assumption `S0`.
pub fn proof_parents<'a>(
    premises: &'a [Formula],
    steps: &'a [ProofStep],
    assumption: Option<&'a Formula>,
    i: usize,
) -> Vec<Option<&'a Formula>> {
    steps[i]
        .parents
        .iter()
        .map(|r| match *r {
            StepRef::Premise(n) => n.checked_sub(1).and_then(|k| premises.get(k)),
            StepRef::Step(0) => assumption,
            StepRef::Step(n) if n <= i => Some(&steps[n - 1].formula),
            StepRef::Step(_) => None,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKey {
    Rule,
    Level,
    Strategy,
    Backend,
}

impl GroupKey {
    pub const ALL: [GroupKey; 4] = [GroupKey::Rule, GroupKey::Level, GroupKey::Strategy, GroupKey::Backend];

    /// Sort position and label of a record's group.
    fn of(self, r: &EvalRecord) -> (usize, String) {
        match self {
            GroupKey::Rule => (rule_position(r.rule), r.rule.short_name().to_owned()),
            GroupKey::Level => (r.level as usize, r.level.as_str().to_owned()),
            GroupKey::Strategy => (r.strategy as usize, r.strategy.as_str().to_owned()),
            GroupKey::Backend => (0, r.backend.clone()),
        }
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKey::Rule => "rule",
            GroupKey::Level => "level",
            GroupKey::Strategy => "strategy",
            GroupKey::Backend => "backend",
        })
    }
}

fn rule_position(rule: RuleId) -> usize {
    RuleId::ALL.iter().position(|&r| r == rule).expect("canonical rule")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no records to aggregate")]
pub struct EmptyRecords;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub key: String,
    pub n: usize,
    pub correct: usize,
    /// Percent, rounded to two decimals.
    pub accuracy: f64,
}

/// `correct / n` as a percentage rounded to 0.01.
pub fn percent(correct: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (correct as f64 * 10_000.0 / n as f64).round() / 100.0
}

/// Accuracy per group, in canonical rule, level or strategy order and
/// alphabetical backend order.
pub fn accuracy_by(records: &[EvalRecord], key: GroupKey) -> Result<Vec<GroupRow>, EmptyRecords> {
    if records.is_empty() {
        return Err(EmptyRecords);
    }
    let mut groups: BTreeMap<(usize, String), (usize, usize)> = BTreeMap::new();
    for r in records {
        let g = groups.entry(key.of(r)).or_default();
        g.0 += 1;
        g.1 += r.correct as usize;
    }
    Ok(groups
        .into_iter()
        .map(|((_, key), (n, correct))| GroupRow { key, n, correct, accuracy: percent(correct, n) })
        .collect())
}

/// Correct and incorrect counts per rule, with incorrect ones split by reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub rule: String,
    pub correct: usize,
    pub incorrect: usize,
    pub reasons: BTreeMap<String, usize>,
}

pub fn breakdown_by_rule(records: &[EvalRecord]) -> Vec<BreakdownRow> {
    let mut rows: BTreeMap<usize, BreakdownRow> = BTreeMap::new();
    for r in records {
        let row = rows.entry(rule_position(r.rule)).or_insert_with(|| BreakdownRow {
            rule: r.rule.short_name().to_owned(),
            correct: 0,
            incorrect: 0,
            reasons: BTreeMap::new(),
        });
        if r.correct {
            row.correct += 1;
        } else {
            row.incorrect += 1;
            let reason = r.reason.clone().unwrap_or_else(|| "unknown".into());
            *row.reasons.entry(reason).or_default() += 1;
        }
    }
    rows.into_values().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniqueHints {
    pub per_problem: Vec<ProblemCount>,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemCount {
    pub problem: String,
    pub count: usize,
}

/// Distinct hints per problem, where two hints are the same when formula,
/// rule and cited parents all match. Only hint records count.
pub fn unique_hints_per_problem(records: &[EvalRecord]) -> UniqueHints {
    let mut seen: BTreeMap<&str, BTreeSet<(String, RuleId, Vec<StepRef>)>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.task == Task::Hint) {
        seen.entry(&r.problem).or_default().insert((
            r.step.formula.to_string(),
            r.step.rule,
            r.step.parents.clone(),
        ));
    }
    let per_problem: Vec<ProblemCount> = seen
        .into_iter()
        .map(|(p, s)| ProblemCount { problem: p.to_owned(), count: s.len() })
        .collect();
    let mean = if per_problem.is_empty() {
        0.0
    } else {
        per_problem.iter().map(|c| c.count).sum::<usize>() as f64 / per_problem.len() as f64
    };
    UniqueHints { per_problem, mean }
}

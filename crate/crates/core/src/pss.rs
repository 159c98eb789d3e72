//! Interaction logs to problem-solving states, and the text rendering of a
//! state used in prompts.
//!
//! A log is newline-delimited JSON. The first line names the problem; each
//! later line is one event:
//!
//! ```text
//! {"type":"start","problem":"t1-1"}
//! {"type":"derive","formula":"A","rule":"Simp","parents":["P1"],"timestamp":1200}
//! {"type":"delete","step":1,"timestamp":1500}
//! {"type":"hint_request","timestamp":1800}
//! ```
//!
//! Deleting a step also removes every step that cites it, directly or not;
//! the survivors are renumbered and their citations rewritten.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{parse, Formula, Site};
use crate::kernel::{Problem, ProofStep, Pss, StepRef};
use crate::rules::{format_site, parse_site, Direction, RuleId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    Derive {
        formula: Formula,
        rule: RuleId,
        parents: Vec<StepRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        site: Option<Site>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<Direction>,
        #[serde(default)]
        timestamp: u64,
    },
    Delete {
        step: usize,
        #[serde(default)]
        timestamp: u64,
    },
    HintRequest {
        #[serde(default)]
        timestamp: u64,
    },
}

impl Event {
    pub fn timestamp(&self) -> u64 {
        match self {
            Event::Derive { timestamp, .. }
            | Event::Delete { timestamp, .. }
            | Event::HintRequest { timestamp } => *timestamp,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename = "start")]
struct Header {
    problem: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionLog {
    pub problem: String,
    pub events: Vec<Event>,
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("log is empty; the first line must be a start record")]
    MissingHeader,
    #[error("event {event}: {message}")]
    Unresolvable { event: usize, message: String },
    #[error("log is for problem `{log}`, not `{problem}`")]
    WrongProblem { log: String, problem: String },
    #[error("event {event}: timestamp {timestamp} is earlier than the previous event")]
    OutOfOrder { event: usize, timestamp: u64 },
}

impl InteractionLog {
    pub fn new(problem: impl Into<String>, events: Vec<Event>) -> Self {
        InteractionLog { problem: problem.into(), events }
    }

    /// Parses NDJSON; blank lines are skipped. Errors carry 1-based line
    /// numbers.
    pub fn from_ndjson(text: &str) -> Result<Self, LogError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, first) = lines.next().ok_or(LogError::MissingHeader)?;
        let header: Header =
            serde_json::from_str(first).map_err(|source| LogError::Json { line, source })?;
        let mut events = Vec::new();
        for (line, text) in lines {
            events.push(serde_json::from_str(text).map_err(|source| LogError::Json { line, source })?);
        }
        Ok(InteractionLog { problem: header.problem, events })
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = serde_json::to_string(&Header { problem: self.problem.clone() }).expect("serializes");
        out.push('\n');
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("serializes"));
            out.push('\n');
        }
        out
    }
}

/// Removes step `k` (1-based) and everything depending on it, then
/// renumbers. Returns `None` if there is no step `k`.
fn delete_cascade(derived: &[ProofStep], k: usize) -> Option<Vec<ProofStep>> {
    if k == 0 || k > derived.len() {
        return None;
    }
    let mut removed = vec![false; derived.len()];
    removed[k - 1] = true;
    for i in k..derived.len() {
        removed[i] = derived[i]
            .parents
            .iter()
            .any(|r| matches!(r, StepRef::Step(n) if *n >= 1 && removed[n - 1]));
    }
    let mut new_number = vec![0; derived.len()];
    let mut out = Vec::new();
    for (i, step) in derived.iter().enumerate() {
        if removed[i] {
            continue;
        }
        let mut step = step.clone();
        step.parents = step
            .parents
            .iter()
            .map(|r| match r {
                StepRef::Step(n) if *n >= 1 => StepRef::Step(new_number[n - 1]),
                other => *other,
            })
            .collect();
        out.push(step);
        new_number[i] = out.len();
        out.last_mut().expect("just pushed").index = out.len();
    }
    Some(out)
}

/// Replays `log` against `problem` and returns the distinct states reached
/// after each event, in first-seen order. An empty log yields the initial
/// state.
///
/// Steps are kept whether or not they are valid; only references must
/// resolve.
pub fn extract_states(log: &InteractionLog, problem: &Problem) -> Result<Vec<Pss>, LogError> {
    if log.problem != problem.id {
        return Err(LogError::WrongProblem { log: log.problem.clone(), problem: problem.id.clone() });
    }
    let mut derived: Vec<ProofStep> = Vec::new();
    let mut seen: HashSet<Vec<ProofStep>> = HashSet::new();
    let mut states = Vec::new();
    let mut last_time = 0;
    for (i, event) in log.events.iter().enumerate() {
        let number = i + 1;
        if event.timestamp() < last_time {
            return Err(LogError::OutOfOrder { event: number, timestamp: event.timestamp() });
        }
        last_time = event.timestamp();
        match event {
            Event::Derive { formula, rule, parents, site, direction, .. } => {
                for r in parents {
                    let ok = match r {
                        StepRef::Premise(n) => *n <= problem.premises.len(),
                        StepRef::Step(n) => *n >= 1 && *n <= derived.len(),
                    };
                    if !ok {
                        return Err(LogError::Unresolvable {
                            event: number,
                            message: format!("derive cites {r}, which does not exist"),
                        });
                    }
                }
                derived.push(ProofStep {
                    index: derived.len() + 1,
                    formula: formula.clone(),
                    rule: *rule,
                    parents: parents.clone(),
                    site: site.clone(),
                    direction: *direction,
                });
            }
            Event::Delete { step, .. } => {
                derived = delete_cascade(&derived, *step).ok_or_else(|| LogError::Unresolvable {
                    event: number,
                    message: format!("delete of S{step}, which does not exist"),
                })?;
            }
            Event::HintRequest { .. } => {}
        }
        if seen.insert(derived.clone()) {
            let mut state = Pss::new(problem.clone(), derived.clone());
            state.order = number;
            state.timestamp = Some(event.timestamp());
            states.push(state);
        }
    }
    if states.is_empty() {
        states.push(Pss::initial(problem.clone()));
    }
    Ok(states)
}

/// The bracketed justification of a step, as printed by [`render`].
pub fn annotation(step: &ProofStep) -> String {
    let refs: Vec<String> = step.parents.iter().map(StepRef::to_string).collect();
    let mut out = format!("[{} from {}", step.rule, refs.join(", "));
    if let Some(site) = &step.site {
        out.push_str("; at ");
        out.push_str(&format_site(site));
    }
    if let Some(direction) = step.direction {
        out.push_str("; ");
        out.push_str(direction.as_str());
    }
    out.push(']');
    out
}

/// The fixed text block for a state:
///
/// ```text
/// Givens:
/// P1: A -> B
/// P2: A
/// Derived:
/// S1: B [MP from P1, P2]
/// Goal: B
/// ```
///
/// `Derived:` is left out when nothing has been derived. Replacement steps
/// that record a site or direction add `; at <site>` and `; <direction>`
/// inside the brackets.
pub fn render(state: &Pss) -> String {
    let mut out = String::from("Givens:\n");
    for (i, p) in state.problem.premises.iter().enumerate() {
        out.push_str(&format!("P{}: {p}\n", i + 1));
    }
    if !state.derived.is_empty() {
        out.push_str("Derived:\n");
        for (i, s) in state.derived.iter().enumerate() {
            out.push_str(&format!("S{}: {} {}\n", i + 1, s.formula, annotation(s)));
        }
    }
    out.push_str(&format!("Goal: {}\n", state.problem.conclusion));
    out
}

/// What [`render`] puts into the text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PssContent {
    pub premises: Vec<Formula>,
    pub derived: Vec<ProofStep>,
    pub conclusion: Formula,
}

impl PssContent {
    pub fn of(state: &Pss) -> Self {
        PssContent {
            premises: state.problem.premises.clone(),
            derived: state.derived.clone(),
            conclusion: state.problem.conclusion.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct RenderParseError {
    pub line: usize,
    pub message: String,
}

fn numbered(line: &str, prefix: char, expected: usize) -> Option<&str> {
    let rest = line.strip_prefix(prefix)?;
    let (n, body) = rest.split_once(": ")?;
    (n.parse::<usize>().ok()? == expected).then_some(body)
}

fn parse_annotated(body: &str, index: usize) -> Result<ProofStep, String> {
    let open = body.rfind(" [").ok_or("missing rule annotation")?;
    let (formula, ann) = body.split_at(open);
    let ann = ann[2..].strip_suffix(']').ok_or("unclosed annotation")?;
    let mut parts = ann.split("; ");
    let head = parts.next().ok_or("empty annotation")?;
    let (rule, refs) = head.split_once(" from ").ok_or("annotation lacks `from`")?;
    let rule: RuleId = rule.parse().map_err(|e: crate::rules::RuleError| e.to_string())?;
    let parents = if refs.is_empty() {
        Vec::new()
    } else {
        refs.split(", ").map(str::parse).collect::<Result<Vec<StepRef>, _>>()?
    };
    let mut site = None;
    let mut direction = None;
    for part in parts {
        if let Some(s) = part.strip_prefix("at ") {
            site = Some(parse_site(s).ok_or_else(|| format!("bad site `{s}`"))?);
        } else {
            direction = Some(part.parse()?);
        }
    }
    let formula = parse(formula).map_err(|e| e.to_string())?;
    Ok(ProofStep { index, formula, rule, parents, site, direction })
}

/// Inverse of [`render`].
pub fn parse_rendered(text: &str) -> Result<PssContent, RenderParseError> {
    let err = |line: usize, message: String| RenderParseError { line, message };
    let lines: Vec<&str> = text.lines().collect();
    let mut i = 0;
    if lines.first() != Some(&"Givens:") {
        return Err(err(1, "expected `Givens:`".into()));
    }
    i += 1;
    let mut premises = Vec::new();
    while let Some(body) = lines.get(i).and_then(|l| numbered(l, 'P', premises.len() + 1)) {
        premises.push(parse(body).map_err(|e| err(i + 1, e.to_string()))?);
        i += 1;
    }
    let mut derived = Vec::new();
    if lines.get(i) == Some(&"Derived:") {
        i += 1;
        while let Some(body) = lines.get(i).and_then(|l| numbered(l, 'S', derived.len() + 1)) {
            derived.push(parse_annotated(body, derived.len() + 1).map_err(|m| err(i + 1, m))?);
            i += 1;
        }
    }
    let goal = lines
        .get(i)
        .and_then(|l| l.strip_prefix("Goal: "))
        .ok_or_else(|| err(i + 1, "expected `Goal: <formula>`".into()))?;
    let conclusion = parse(goal).map_err(|e| err(i + 1, e.to_string()))?;
    if i + 1 != lines.len() {
        return Err(err(i + 2, "unexpected text after the goal".into()));
    }
    Ok(PssContent { premises, derived, conclusion })
}

/// A state as written to `pss.json`: the state, its rendering, and which
/// derived steps (1-based) fail the checker.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PssRecord {
    #[serde(flatten)]
    pub state: Pss,
    pub rendered: String,
    pub invalid_steps: Vec<usize>,
}

impl PssRecord {
    pub fn new(state: Pss) -> Self {
        let rendered = render(&state);
        let invalid_steps = state
            .step_verdicts()
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_valid())
            .map(|(i, _)| i + 1)
            .collect();
        PssRecord { state, rendered, invalid_steps }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PssSet {
    pub states: Vec<PssRecord>,
}

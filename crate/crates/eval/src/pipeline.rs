//! Batch evaluation: prompt a backend for proofs or hints, judge every
//! answer with the kernel, and write the tables.

use std::fs;
use std::io;
use std::path::Path;

use logichint_core::kernel::{
    check_proof, to_document_string, validate_hint, Problem, ProblemSet, Proof, Pss,
};
use logichint_core::pss::PssSet;
use logichint_gateway::Gateway;
use logichint_prompt::{parse_hint, parse_proof, Forge, PromptBundle, Role, SplitConfig, Strategy, Task};
use serde::Serialize;

use crate::grade::{GradeItem, GradeItems};
use crate::ratings::Agreement;
use crate::records::{
    accuracy_by, breakdown_by_rule, percent, proof_parents, unique_hints_per_problem, BreakdownRow, EvalRecord,
    GroupKey, GroupRow, Origin, UniqueHints,
};
use crate::stats::{welch_t, Welch};

/// What to evaluate: whole problems (prove task) or student states (hint task).
#[derive(Debug, Clone)]
pub enum Input {
    Problems(ProblemSet),
    States(PssSet),
}

impl Input {
    pub fn task(&self) -> Task {
        match self {
            Input::Problems(_) => Task::Prove,
            Input::States(_) => Task::Hint,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub strategies: Vec<Strategy>,
    /// Only problems in this part of the split are evaluated.
    pub role: Role,
}

impl PipelineConfig {
    pub fn new(strategies: Vec<Strategy>) -> Self {
        PipelineConfig { strategies, role: Role::Test }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Prompt,
    Completion,
    Parse,
}

/// An item that produced no records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub item: String,
    pub strategy: Strategy,
    pub stage: Stage,
    pub message: String,
}

/// Outcome of one generated proof.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProofOutcome {
    pub problem: String,
    pub strategy: Strategy,
    pub steps: usize,
    pub valid_steps: usize,
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Overall {
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Mean parent length of incorrect versus correct records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParentLength {
    pub incorrect_mean: Option<f64>,
    pub correct_mean: Option<f64>,
    /// `None` when either group has fewer than two records.
    pub welch: Option<Welch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub task: Task,
    pub backend: String,
    pub model: String,
    pub role: Role,
    pub strategies: Vec<Strategy>,
    pub items: usize,
    pub rows: usize,
    /// Set when no record was produced; every table is then empty.
    pub empty: bool,
    pub overall: Overall,
    pub by_strategy: Vec<GroupRow>,
    pub by_backend: Vec<GroupRow>,
    pub by_rule: Vec<GroupRow>,
    pub by_level: Vec<GroupRow>,
    pub breakdown: Vec<BreakdownRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unique_hints: Option<UniqueHints>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub proofs: Vec<ProofOutcome>,
    pub parent_length: ParentLength,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub records: Vec<EvalRecord>,
    pub summary: Summary,
    pub agreement: Option<Agreement>,
    /// Hint explanations, ready for rubric grading (hint task only).
    pub explanations: GradeItems,
}

struct Item<'a> {
    id: String,
    problem: &'a Problem,
    state: Option<&'a Pss>,
}

/// Runs every strategy over the items of `input` that fall in `cfg.role`.
/// Items that fail to prompt, complete or parse are listed in the summary
/// and skipped.
pub fn run_pipeline(
    input: &Input,
    cfg: &PipelineConfig,
    forge: &Forge,
    gateway: &Gateway,
    split: &SplitConfig,
) -> EvalReport {
    let in_role = |id: &str| split.role_of(id) == Some(cfg.role);
    let items: Vec<Item<'_>> = match input {
        Input::Problems(set) => set
            .problems
            .iter()
            .filter(|p| in_role(&p.id))
            .map(|p| Item { id: p.id.clone(), problem: p, state: None })
            .collect(),
        Input::States(set) => set
            .states
            .iter()
            .filter(|r| in_role(&r.state.problem.id))
            .map(|r| Item {
                id: format!("{}@{}", r.state.problem.id, r.state.order),
                problem: &r.state.problem,
                state: Some(&r.state),
            })
            .collect(),
    };
    let backend = gateway.config().model.clone();
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut proofs = Vec::new();
    let mut explanations = Vec::new();

    for &strategy in &cfg.strategies {
        let mut bundles: Vec<PromptBundle> = Vec::new();
        let mut prompted: Vec<&Item<'_>> = Vec::new();
        for item in &items {
            let bundle = match item.state {
                None => forge.prove(item.problem, strategy),
                Some(state) => forge.hint(state, strategy),
            };
            match bundle {
                Ok(b) => {
                    bundles.push(b);
                    prompted.push(item);
                }
                Err(e) => failures.push(Failure {
                    item: item.id.clone(),
                    strategy,
                    stage: Stage::Prompt,
                    message: e.to_string(),
                }),
            }
        }
        let completions = gateway.complete_all(&bundles);
        for (item, completion) in prompted.into_iter().zip(completions) {
            let fail = |stage, message: String| Failure { item: item.id.clone(), strategy, stage, message };
            let text = match completion.result() {
                Ok(t) => t,
                Err(e) => {
                    failures.push(fail(Stage::Completion, e.to_string()));
                    continue;
                }
            };
            let origin = Origin { problem: &item.problem.id, level: item.problem.level, strategy, backend: &backend };
            match item.state {
                None => {
                    let parsed = parse_proof(text);
                    if !parsed.parse_ok {
                        failures.push(fail(Stage::Parse, parsed.error.unwrap_or_default()));
                        continue;
                    }
                    let proof = Proof::new(item.problem.clone(), parsed.steps, parsed.mode);
                    let report = check_proof(&proof);
                    let assumption = proof.assumption();
                    for (i, (step, verdict)) in proof.steps.iter().zip(&report.verdicts).enumerate() {
                        let parents = proof_parents(&proof.problem.premises, &proof.steps, assumption.as_ref(), i);
                        records.push(EvalRecord::from_step(&origin, step, verdict, &parents));
                    }
                    proofs.push(ProofOutcome {
                        problem: item.problem.id.clone(),
                        strategy,
                        steps: report.total_steps,
                        valid_steps: report.valid_steps,
                        complete: report.complete,
                    });
                }
                Some(state) => {
                    let parsed = parse_hint(text);
                    let Some(hint) = parsed.hint else {
                        failures.push(fail(Stage::Parse, parsed.error.unwrap_or_default()));
                        continue;
                    };
                    let mut step = hint.step;
                    step.index = state.derived.len() + 1;
                    let verdict = validate_hint(state, &step);
                    let record = EvalRecord::from_hint(&origin, state, &step, hint.explanation, &verdict);
                    if let Some(text) = record.explanation.as_ref().filter(|t| !t.trim().is_empty()) {
                        explanations.push(GradeItem {
                            id: format!("{}/{}", record.id, strategy.as_str()),
                            state: state.clone(),
                            explanation: text.clone(),
                        });
                    }
                    records.push(record);
                }
            }
        }
    }

    let summary = summarize(input.task(), gateway, cfg, items.len(), &records, proofs, failures);
    EvalReport { records, summary, agreement: None, explanations: GradeItems { items: explanations } }
}

fn summarize(
    task: Task,
    gateway: &Gateway,
    cfg: &PipelineConfig,
    items: usize,
    records: &[EvalRecord],
    proofs: Vec<ProofOutcome>,
    failures: Vec<Failure>,
) -> Summary {
    let table = |key| accuracy_by(records, key).unwrap_or_default();
    let correct = records.iter().filter(|r| r.correct).count();
    let lengths = |ok: bool| -> Vec<f64> {
        records.iter().filter(|r| r.correct == ok).map(|r| r.parent_length_sum as f64).collect()
    };
    let (bad, good) = (lengths(false), lengths(true));
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    Summary {
        task,
        backend: gateway.config().id.clone(),
        model: gateway.config().model.clone(),
        role: cfg.role,
        strategies: cfg.strategies.clone(),
        items,
        rows: records.len(),
        empty: records.is_empty(),
        overall: Overall { n: records.len(), correct, accuracy: percent(correct, records.len()) },
        by_strategy: table(GroupKey::Strategy),
        by_backend: table(GroupKey::Backend),
        by_rule: table(GroupKey::Rule),
        by_level: table(GroupKey::Level),
        breakdown: breakdown_by_rule(records),
        unique_hints: (task == Task::Hint).then(|| unique_hints_per_problem(records)),
        proofs,
        parent_length: ParentLength {
            incorrect_mean: mean(&bad),
            correct_mean: mean(&good),
            welch: welch_t(&bad, &good).ok(),
        },
        failures,
    }
}

const CSV_HEADER: [&str; 13] = [
    "id", "problem", "level", "strategy", "backend", "task", "index", "formula", "rule", "parents",
    "parent_length_sum", "correct", "reason",
];

impl EvalReport {
    /// One row per record. An empty run still writes the header.
    pub fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("write to memory");
        for r in &self.records {
            let parents: Vec<String> = r.step.parents.iter().map(|p| p.to_string()).collect();
            w.write_record([
                r.id.as_str(),
                &r.problem,
                r.level.as_str(),
                r.strategy.as_str(),
                &r.backend,
                r.task.as_str(),
                &r.step.index.to_string(),
                &r.step.formula.to_string(),
                r.rule.short_name(),
                &parents.join(" "),
                &r.parent_length_sum.to_string(),
                if r.correct { "true" } else { "false" },
                r.reason.as_deref().unwrap_or(""),
            ])
            .expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("csv is utf-8")
    }

    pub fn summary_json(&self) -> String {
        to_document_string(&self.summary)
    }

    /// Writes `report.csv` and `summary.json` into `dir`, plus
    /// `agreement.json` when ratings were compared and `explanations.json`
    /// when hints came with explanations.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.csv"), self.csv())?;
        fs::write(dir.join("summary.json"), self.summary_json())?;
        if let Some(a) = &self.agreement {
            write_agreement(dir, a)?;
        }
        if !self.explanations.items.is_empty() {
            fs::write(dir.join("explanations.json"), to_document_string(&self.explanations))?;
        }
        Ok(())
    }
}

pub fn write_agreement(dir: &Path, agreement: &Agreement) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("agreement.json"), to_document_string(agreement))
}

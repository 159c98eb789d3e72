//! Worked examples for few-shot prompts, tied to reference solutions of
//! training problems.

use serde::Deserialize;
use thiserror::Error;

use logichint_core::kernel::{from_document, DocumentError, Hint, ProblemSet, ProofStep, Pss, SolutionSet};
use logichint_core::pss::render;

use crate::forge::problem_text;
use crate::split::{Role, SplitConfig};
use crate::strategy::{Strategy, Task};

#[derive(Debug, Error)]
pub enum BankError {
    #[error("example bank: {0}")]
    Document(#[from] DocumentError),
    #[error("example {index}: problem `{id}` is {role}, but examples must come from training problems")]
    NotTraining { index: usize, id: String, role: String },
    #[error("example {index}: problem `{id}` has no reference solution")]
    NoSolution { index: usize, id: String },
    #[error("example {index}: {message}")]
    Invalid { index: usize, message: String },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExample {
    task: Task,
    strategy: Strategy,
    problem: String,
    #[serde(default)]
    steps_done: Option<usize>,
    reasoning: String,
    #[serde(default)]
    explanation: Option<String>,
}

#[derive(Debug, Deserialize)]
struct RawBank {
    examples: Vec<RawExample>,
}

/// A worked example, already rendered into the three pieces the `[example]`
/// template section takes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub task: Task,
    pub strategy: Strategy,
    pub problem_id: String,
    pub input: String,
    pub reasoning: String,
    pub answer: String,
}

/// `{"steps": [...]}` with one compact step per line.
fn steps_json(steps: &[ProofStep]) -> String {
    let lines: Vec<String> =
        steps.iter().map(|s| format!("  {}", serde_json::to_string(s).expect("serializes"))).collect();
    format!("{{\"steps\": [\n{}\n]}}", lines.join(",\n"))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ExampleBank {
    examples: Vec<Example>,
}

const BUILTIN: &str = include_str!("../../../data/prompts/examples.json");

impl ExampleBank {
    /// The bundled bank, resolved against the bundled problems and split.
    pub fn builtin() -> ExampleBank {
        ExampleBank::from_json(
            BUILTIN,
            &logichint_core::data::lt20(),
            &logichint_core::data::lt20_solutions(),
            &SplitConfig::builtin(),
        )
        .expect("bundled example bank is valid")
    }

    /// Prove examples answer with the whole reference solution. Hint
    /// examples show the state after `steps_done` reference steps and answer
    /// with the next one. Every problem must be in the training split.
    pub fn from_json(
        text: &str,
        problems: &ProblemSet,
        solutions: &SolutionSet,
        split: &SplitConfig,
    ) -> Result<ExampleBank, BankError> {
        let raw: RawBank = from_document(text)?;
        let mut examples = Vec::with_capacity(raw.examples.len());
        for (i, ex) in raw.examples.into_iter().enumerate() {
            let index = i + 1;
            let invalid = |message: &str| BankError::Invalid { index, message: message.to_string() };
            match split.role_of(&ex.problem) {
                Some(Role::Training) => {}
                other => {
                    return Err(BankError::NotTraining {
                        index,
                        id: ex.problem.clone(),
                        role: other.map_or("unassigned".to_string(), |r| r.to_string()),
                    })
                }
            }
            if !ex.strategy.is_few_shot() {
                return Err(invalid("zero-shot prompts take no examples"));
            }
            let problem = problems.get(&ex.problem).ok_or_else(|| invalid("unknown problem"))?;
            let solution = solutions
                .get(&ex.problem)
                .ok_or_else(|| BankError::NoSolution { index, id: ex.problem.clone() })?;
            let (input, answer) = match (ex.task, ex.steps_done, &ex.explanation) {
                (Task::Prove, None, None) => {
                    (problem_text(problem), steps_json(&solution.steps))
                }
                (Task::Hint, Some(done), Some(explanation)) => {
                    if done >= solution.steps.len() {
                        return Err(invalid("steps_done leaves no next step"));
                    }
                    let state = Pss::new(problem.clone(), solution.steps[..done].to_vec());
                    let hint = Hint { step: solution.steps[done].clone(), explanation: Some(explanation.clone()) };
                    (render(&state).trim_end().to_string(), serde_json::to_string(&hint).expect("serializes"))
                }
                (Task::Prove, ..) => return Err(invalid("prove examples take neither steps_done nor explanation")),
                (Task::Hint, ..) => return Err(invalid("hint examples need steps_done and explanation")),
                (Task::Grade, ..) => return Err(invalid("grading prompts take no examples")),
            };
            examples.push(Example {
                task: ex.task,
                strategy: ex.strategy,
                problem_id: ex.problem,
                input,
                reasoning: ex.reasoning.trim_end().to_string(),
                answer,
            });
        }
        Ok(ExampleBank { examples })
    }

    /// Examples for `task` and `strategy`, in file order.
    pub fn examples(&self, task: Task, strategy: Strategy) -> impl Iterator<Item = &Example> {
        self.examples.iter().filter(move |e| e.task == task && e.strategy == strategy)
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_bank_has_two_per_few_shot_pair() {
        let bank = ExampleBank::builtin();
        for task in [Task::Prove, Task::Hint] {
            for s in Strategy::ALL {
                let want = if s.is_few_shot() { 2 } else { 0 };
                assert_eq!(bank.examples(task, s).count(), want, "{task} {s}");
            }
        }
    }

    #[test]
    fn non_training_problems_are_refused() {
        let text = r#"{"schema":"logichint/v1","examples":[
            {"task":"prove","strategy":"FS_CoT","problem":"t1-1","reasoning":"r"}]}"#;
        let err = ExampleBank::from_json(
            text,
            &logichint_core::data::lt20(),
            &logichint_core::data::lt20_solutions(),
            &SplitConfig::builtin(),
        )
        .unwrap_err();
        assert_eq!(
            err.to_string(),
            "example 1: problem `t1-1` is test, but examples must come from training problems"
        );
    }
}

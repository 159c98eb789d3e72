use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use logichint_core::kernel::{Problem, Pss};
use logichint_core::pss::render;

use crate::bank::ExampleBank;
use crate::rubric::Dimension;
use crate::strategy::{Strategy, Task};
use crate::template::{Section, TemplateError, TemplateSet};

/// An assembled prompt. [`PromptBundle::text`] joins the sections in a fixed
/// order: context, instructions, output expectations, examples, user prompt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PromptBundle {
    pub task: Task,
    pub strategy: Strategy,
    pub context: String,
    pub instructions: String,
    pub output_expectations: String,
    pub examples: Vec<String>,
    pub user_prompt: String,
    /// Set for grading prompts whose explanation is blank.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl PromptBundle {
    /// The text sent to the model.
    pub fn text(&self) -> String {
        let mut parts = vec![
            format!("## Context\n{}", self.context),
            format!("## Instructions\n{}", self.instructions),
            format!("## Output expectations\n{}", self.output_expectations),
        ];
        if !self.examples.is_empty() {
            let shown: Vec<String> =
                self.examples.iter().enumerate().map(|(i, e)| format!("### Example {}\n{e}", i + 1)).collect();
            parts.push(format!("## Examples\n{}", shown.join("\n\n")));
        }
        parts.push(format!("## Your task\n{}", self.user_prompt));
        let mut text = parts.join("\n\n");
        text.push('\n');
        text
    }
}

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("{strategy} {task} prompts need {needed} examples, the bank has {available}")]
    InsufficientExamples { task: Task, strategy: Strategy, needed: usize, available: usize },
    #[error("no template for {0} {1}")]
    MissingTemplate(Task, Strategy),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

/// How many worked examples each few-shot strategy shows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shots {
    pub default: usize,
    pub per_strategy: BTreeMap<Strategy, usize>,
}

impl Default for Shots {
    fn default() -> Self {
        Shots { default: 2, per_strategy: BTreeMap::new() }
    }
}

impl Shots {
    pub fn count(&self, strategy: Strategy) -> usize {
        if !strategy.is_few_shot() {
            return 0;
        }
        self.per_strategy.get(&strategy).copied().unwrap_or(self.default).max(1)
    }
}

/// Premises and conclusion as they appear in prove prompts.
pub fn problem_text(problem: &Problem) -> String {
    let mut out = String::from("Premises:\n");
    for (i, p) in problem.premises.iter().enumerate() {
        out.push_str(&format!("P{}: {p}\n", i + 1));
    }
    out.push_str(&format!("Conclusion: {}", problem.conclusion));
    out
}

/// Builds prompts from templates and the example bank.
#[derive(Debug, Clone)]
pub struct Forge {
    pub templates: TemplateSet,
    pub bank: ExampleBank,
    pub shots: Shots,
}

impl Forge {
    pub fn new(templates: TemplateSet, bank: ExampleBank) -> Forge {
        Forge { templates, bank, shots: Shots::default() }
    }

    pub fn builtin() -> Forge {
        Forge::new(TemplateSet::builtin(), ExampleBank::builtin())
    }

    pub fn prove(&self, problem: &Problem, strategy: Strategy) -> Result<PromptBundle, ForgeError> {
        self.assemble(Task::Prove, strategy, &problem.id, &problem_text(problem))
    }

    /// A next-step prompt for the rendered state.
    pub fn hint(&self, state: &Pss, strategy: Strategy) -> Result<PromptBundle, ForgeError> {
        self.assemble(Task::Hint, strategy, &state.problem.id, render(state).trim_end())
    }

    /// A rubric-rating prompt for one explanation.
    pub fn grade(&self, explanation: &str, state: &Pss) -> Result<PromptBundle, ForgeError> {
        let template = self
            .templates
            .get(Task::Grade, Strategy::ZS)
            .ok_or(ForgeError::MissingTemplate(Task::Grade, Strategy::ZS))?;
        let rubric = &self.templates.rubric;
        let criteria: Vec<String> =
            rubric.criteria.iter().map(|c| format!("- {}: {}", c.name, c.definition)).collect();
        let shape: Vec<String> = Dimension::ALL.iter().map(|d| format!("\"{d}\": <score>")).collect();
        let (min, max) = (rubric.min.to_string(), rubric.max.to_string());
        let rendered = render(state);
        let values = [
            ("min", min.as_str()),
            ("max", max.as_str()),
            ("criteria", &criteria.join("\n")),
            ("score_shape", &format!("{{{}}}", shape.join(", "))),
            ("state", rendered.trim_end()),
            ("explanation", explanation.trim()),
        ];
        Ok(PromptBundle {
            task: Task::Grade,
            strategy: Strategy::ZS,
            context: template.render(Section::Context, &values)?,
            instructions: template.render(Section::Instructions, &values)?,
            output_expectations: template.render(Section::OutputExpectations, &values)?,
            examples: Vec::new(),
            user_prompt: template.render(Section::UserPrompt, &values)?,
            degenerate: explanation.trim().is_empty(),
        })
    }

    /// Examples from the problem being asked about are never shown.
    fn assemble(&self, task: Task, strategy: Strategy, problem_id: &str, input: &str) -> Result<PromptBundle, ForgeError> {
        let template = self.templates.get(task, strategy).ok_or(ForgeError::MissingTemplate(task, strategy))?;
        let needed = self.shots.count(strategy);
        let available: Vec<_> = self.bank.examples(task, strategy).filter(|e| e.problem_id != problem_id).collect();
        if available.len() < needed {
            return Err(ForgeError::InsufficientExamples { task, strategy, needed, available: available.len() });
        }
        let mut examples = Vec::with_capacity(needed);
        for e in &available[..needed] {
            let values = [
                ("rules", self.templates.rules.as_str()),
                ("input", e.input.as_str()),
                ("reasoning", e.reasoning.as_str()),
                ("answer", e.answer.as_str()),
            ];
            examples.push(template.render(Section::Example, &values)?);
        }
        let values = [("rules", self.templates.rules.as_str()), ("input", input), ("reasoning", ""), ("answer", "")];
        Ok(PromptBundle {
            task,
            strategy,
            context: template.render(Section::Context, &values)?,
            instructions: template.render(Section::Instructions, &values)?,
            output_expectations: template.render(Section::OutputExpectations, &values)?,
            examples,
            user_prompt: template.render(Section::UserPrompt, &values)?,
            degenerate: false,
        })
    }
}

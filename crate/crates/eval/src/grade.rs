//! Rubric grading of hint explanations by a model.

use logichint_core::kernel::Pss;
use logichint_gateway::Gateway;
use logichint_prompt::{parse_rubric, Forge, PromptBundle, Strategy};
use serde::{Deserialize, Serialize};

use crate::pipeline::{Failure, Stage};
use crate::ratings::RubricScore;

/// An explanation to rate, with the state it was written for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeItem {
    pub id: String,
    pub state: Pss,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GradeItems {
    pub items: Vec<GradeItem>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct GradeOutcome {
    pub scores: Vec<RubricScore>,
    /// Items whose explanation was blank. They are still sent and scored.
    pub degenerate: Vec<String>,
    pub failures: Vec<Failure>,
}

/// Asks the model behind `gateway` to rate each item; scores are labelled
/// with `rater`. Items that fail are listed, never fatal.
pub fn grade_items(items: &[GradeItem], forge: &Forge, gateway: &Gateway, rater: &str) -> GradeOutcome {
    let mut out = GradeOutcome::default();
    let fail = |item: &GradeItem, stage, message: String| Failure {
        item: item.id.clone(),
        strategy: Strategy::ZS,
        stage,
        message,
    };
    let mut bundles: Vec<PromptBundle> = Vec::new();
    let mut prompted: Vec<&GradeItem> = Vec::new();
    for item in items {
        match forge.grade(&item.explanation, &item.state) {
            Ok(b) => {
                if b.degenerate {
                    out.degenerate.push(item.id.clone());
                }
                bundles.push(b);
                prompted.push(item);
            }
            Err(e) => out.failures.push(fail(item, Stage::Prompt, e.to_string())),
        }
    }
    for (item, completion) in prompted.into_iter().zip(gateway.complete_all(&bundles)) {
        let text = match completion.result() {
            Ok(t) => t,
            Err(e) => {
                out.failures.push(fail(item, Stage::Completion, e.to_string()));
                continue;
            }
        };
        let parsed = parse_rubric(text);
        match parsed.scores {
            Some(s) => out.scores.push(RubricScore::new(&item.id, rater, s)),
            None => out.failures.push(fail(item, Stage::Parse, parsed.error.unwrap_or_default())),
        }
    }
    out
}

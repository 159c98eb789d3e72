//! Template files: `[section]` headers followed by text with `{{name}}`
//! placeholders.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::rubric::Rubric;
use crate::strategy::{Strategy, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Section {
    Context,
    Instructions,
    OutputExpectations,
    /// Layout of one worked example; repeated once per example.
    Example,
    UserPrompt,
}

impl Section {
    pub const ALL: [Section; 5] = [
        Section::Context,
        Section::Instructions,
        Section::OutputExpectations,
        Section::Example,
        Section::UserPrompt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Section::Context => "context",
            Section::Instructions => "instructions",
            Section::OutputExpectations => "output_expectations",
            Section::Example => "example",
            Section::UserPrompt => "user_prompt",
        }
    }

    fn from_header(line: &str) -> Option<Section> {
        let name = line.strip_prefix('[')?.strip_suffix(']')?;
        Section::ALL.into_iter().find(|s| s.name() == name)
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("{source_name}:{line}: {message}")]
    Syntax { source_name: String, line: usize, message: String },
    #[error("{0}: missing section [{1}]")]
    MissingSection(String, Section),
    #[error("{0}: section [{1}] is not allowed here")]
    UnexpectedSection(String, Section),
    #[error("unknown placeholder `{{{{{0}}}}}`")]
    UnknownPlaceholder(String),
    #[error("unclosed placeholder")]
    Unclosed,
    #[error("{0}: {1}")]
    Placeholder(String, Box<TemplateError>),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("rubric: {0}")]
    Rubric(#[from] crate::rubric::RubricError),
}

/// One parsed template file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    sections: BTreeMap<Section, String>,
}

impl Template {
    pub fn parse(source_name: &str, text: &str) -> Result<Template, TemplateError> {
        let mut sections: BTreeMap<Section, String> = BTreeMap::new();
        let mut current: Option<(Section, Vec<&str>)> = None;
        for (i, line) in text.lines().enumerate() {
            if let Some(section) = Section::from_header(line.trim_end()) {
                if let Some((s, body)) = current.take() {
                    sections.insert(s, body.join("\n").trim_matches('\n').to_string());
                }
                if sections.contains_key(&section) {
                    return Err(TemplateError::Syntax {
                        source_name: source_name.into(),
                        line: i + 1,
                        message: format!("section [{section}] repeated"),
                    });
                }
                current = Some((section, Vec::new()));
            } else if let Some((_, body)) = current.as_mut() {
                body.push(line);
            } else if !line.trim().is_empty() {
                return Err(TemplateError::Syntax {
                    source_name: source_name.into(),
                    line: i + 1,
                    message: "text before the first section header".into(),
                });
            }
        }
        if let Some((s, body)) = current {
            sections.insert(s, body.join("\n").trim_matches('\n').to_string());
        }
        Ok(Template { sections })
    }

    pub fn section(&self, section: Section) -> Option<&str> {
        self.sections.get(&section).map(String::as_str)
    }

    /// The section with placeholders filled from `values`.
    pub fn render(&self, section: Section, values: &[(&str, &str)]) -> Result<String, TemplateError> {
        fill(self.section(section).unwrap_or(""), values)
    }

    /// Checks the sections present and that every placeholder is one of
    /// `allowed`.
    fn check(&self, source_name: &str, few_shot: bool, allowed: &[&str]) -> Result<(), TemplateError> {
        for s in [Section::Context, Section::Instructions, Section::OutputExpectations, Section::UserPrompt] {
            if !self.sections.contains_key(&s) {
                return Err(TemplateError::MissingSection(source_name.into(), s));
            }
        }
        match (few_shot, self.sections.contains_key(&Section::Example)) {
            (true, false) => return Err(TemplateError::MissingSection(source_name.into(), Section::Example)),
            (false, true) => return Err(TemplateError::UnexpectedSection(source_name.into(), Section::Example)),
            _ => {}
        }
        let dummy: Vec<(&str, &str)> = allowed.iter().map(|&n| (n, "")).collect();
        for text in self.sections.values() {
            fill(text, &dummy).map_err(|e| TemplateError::Placeholder(source_name.into(), Box::new(e)))?;
        }
        Ok(())
    }
}

/// Replaces each `{{name}}` in `text`. Inserted values are not expanded again.
pub(crate) fn fill(text: &str, values: &[(&str, &str)]) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(open) = rest.find("{{") {
        out.push_str(&rest[..open]);
        let after = &rest[open + 2..];
        let close = after.find("}}").ok_or(TemplateError::Unclosed)?;
        let name = after[..close].trim();
        let value = values
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| TemplateError::UnknownPlaceholder(name.to_string()))?;
        out.push_str(value.1);
        rest = &after[close + 2..];
    }
    out.push_str(rest);
    Ok(out)
}

pub(crate) const PROVE_HINT_FIELDS: &[&str] = &["rules", "input", "reasoning", "answer"];
pub(crate) const GRADE_FIELDS: &[&str] = &["min", "max", "criteria", "score_shape", "state", "explanation"];

const BUILTIN: &[(Task, Strategy, &str)] = &[
    (Task::Prove, Strategy::ZS, include_str!("../templates/prove/ZS.tmpl")),
    (Task::Prove, Strategy::FS_CoT, include_str!("../templates/prove/FS_CoT.tmpl")),
    (Task::Prove, Strategy::FS_PlanAndSolve, include_str!("../templates/prove/FS_PlanAndSolve.tmpl")),
    (Task::Prove, Strategy::FS_L_DCoT, include_str!("../templates/prove/FS_L_DCoT.tmpl")),
    (Task::Prove, Strategy::FS_BL_DCoT, include_str!("../templates/prove/FS_BL_DCoT.tmpl")),
    (Task::Prove, Strategy::FS_ToT_CoT, include_str!("../templates/prove/FS_ToT_CoT.tmpl")),
    (Task::Hint, Strategy::ZS, include_str!("../templates/hint/ZS.tmpl")),
    (Task::Hint, Strategy::FS_CoT, include_str!("../templates/hint/FS_CoT.tmpl")),
    (Task::Hint, Strategy::FS_PlanAndSolve, include_str!("../templates/hint/FS_PlanAndSolve.tmpl")),
    (Task::Hint, Strategy::FS_L_DCoT, include_str!("../templates/hint/FS_L_DCoT.tmpl")),
    (Task::Hint, Strategy::FS_BL_DCoT, include_str!("../templates/hint/FS_BL_DCoT.tmpl")),
    (Task::Hint, Strategy::FS_ToT_CoT, include_str!("../templates/hint/FS_ToT_CoT.tmpl")),
    (Task::Grade, Strategy::ZS, include_str!("../templates/grade/ZS.tmpl")),
];
const BUILTIN_RULES: &str = include_str!("../templates/rules.txt");
const BUILTIN_RUBRIC: &str = include_str!("../templates/rubric.toml");

/// Every template, the rule list shared by them, and the grading rubric.
/// Loaded once and then only read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    templates: BTreeMap<(Task, Strategy), Template>,
    pub rules: String,
    pub rubric: Rubric,
}

impl TemplateSet {
    /// The templates compiled into the crate.
    pub fn builtin() -> TemplateSet {
        let sources = BUILTIN
            .iter()
            .map(|&(t, s, text)| ((t, s), format!("{t}/{s}.tmpl"), text.to_string()))
            .collect();
        Self::assemble(sources, BUILTIN_RULES.to_string(), BUILTIN_RUBRIC)
            .expect("builtin templates are well-formed")
    }

    /// Reads `<dir>/<task>/<strategy>.tmpl` for every prove and hint
    /// strategy, `<dir>/grade/ZS.tmpl`, `<dir>/rules.txt` and
    /// `<dir>/rubric.toml`.
    pub fn from_dir(dir: &Path) -> Result<TemplateSet, TemplateError> {
        let read = |rel: &str| {
            let path = dir.join(rel);
            std::fs::read_to_string(&path).map_err(|source| TemplateError::Io { path, source })
        };
        let mut sources = Vec::new();
        for &(t, s, _) in BUILTIN {
            let rel = format!("{t}/{s}.tmpl");
            let text = read(&rel)?;
            sources.push(((t, s), rel, text));
        }
        Self::assemble(sources, read("rules.txt")?, &read("rubric.toml")?)
    }

    fn assemble(
        sources: Vec<((Task, Strategy), String, String)>,
        rules: String,
        rubric: &str,
    ) -> Result<TemplateSet, TemplateError> {
        let mut templates = BTreeMap::new();
        for ((task, strategy), name, text) in sources {
            let template = Template::parse(&name, &text)?;
            let allowed = if task == Task::Grade { GRADE_FIELDS } else { PROVE_HINT_FIELDS };
            template.check(&name, strategy.is_few_shot(), allowed)?;
            templates.insert((task, strategy), template);
        }
        Ok(TemplateSet {
            templates,
            rules: rules.trim_end().to_string(),
            rubric: Rubric::from_toml(rubric)?,
        })
    }

    pub fn get(&self, task: Task, strategy: Strategy) -> Option<&Template> {
        self.templates.get(&(task, strategy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_in_any_order() {
        let t = Template::parse("t", "\n[user_prompt]\nhi {{input}}\n\n[context]\nctx\n").unwrap();
        assert_eq!(t.section(Section::Context), Some("ctx"));
        assert_eq!(t.render(Section::UserPrompt, &[("input", "A")]).unwrap(), "hi A");
    }

    #[test]
    fn rejects_stray_text_and_repeats() {
        assert!(matches!(Template::parse("t", "oops\n[context]\n"), Err(TemplateError::Syntax { line: 1, .. })));
        assert!(matches!(
            Template::parse("t", "[context]\na\n[context]\nb"),
            Err(TemplateError::Syntax { line: 3, .. })
        ));
    }

    #[test]
    fn fill_is_single_pass() {
        assert_eq!(fill("{{a}}{{b}}", &[("a", "{{b}}"), ("b", "x")]).unwrap(), "{{b}}x");
        assert!(matches!(fill("{{c}}", &[]), Err(TemplateError::UnknownPlaceholder(n)) if n == "c"));
        assert!(matches!(fill("{{c", &[]), Err(TemplateError::Unclosed)));
    }

    #[test]
    fn builtin_set_loads() {
        let set = TemplateSet::builtin();
        assert!(set.get(Task::Grade, Strategy::ZS).is_some());
        assert!(set.get(Task::Grade, Strategy::FS_CoT).is_none());
        assert!(set.rules.lines().count() == 14);
    }

    #[test]
    fn from_dir_matches_builtin() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("templates");
        assert_eq!(TemplateSet::from_dir(&dir).unwrap(), TemplateSet::builtin());
    }
}

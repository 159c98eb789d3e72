//! Prompt construction for six prompting strategies and parsing of the JSON
//! that models send back.
//!
//! Wording lives in template files (`templates/<task>/<strategy>.tmpl`), one
//! per task and strategy, so it can be edited without touching code.

mod bank;
mod forge;
mod response;
mod rubric;
mod split;
mod strategy;
mod template;

pub use bank::{BankError, Example, ExampleBank};
pub use forge::{Forge, ForgeError, PromptBundle, Shots};
pub use response::{
    extract_json, parse_hint, parse_proof, parse_response, parse_rubric, HintResponse,
    ProofResponse, Response, RubricResponse,
};
pub use rubric::{Criterion, Dimension, Rubric, RubricError, RubricScores};
pub use split::{Role, SplitConfig, SplitError};
pub use strategy::{Strategy, Task};
pub use template::{Section, Template, TemplateError, TemplateSet};

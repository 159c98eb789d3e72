//! Bounded forward proof search, next-step hints and a truth-table oracle.

mod engine;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{atom_index, Formula};
use crate::kernel::{check_proof, Hint, Problem, Proof, ProofMode, ProofStep, Pss, StepRef};
use crate::rules::EnumContext;

use engine::{Edge, Engine, Limits, Outcome};

/// How Addition picks its new disjunct during search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdditionPolicy {
    /// Signature atoms and subformulas of the conclusion.
    #[default]
    SignatureAndConclusion,
    /// Never use Addition.
    Disabled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Deepest derivation layer explored.
    pub max_depth: usize,
    /// Stop once this many distinct formulas are known.
    pub max_frontier: usize,
    pub max_formula_len: usize,
    pub addition_policy: AdditionPolicy,
    /// Assume the negated conclusion and search for `0`.
    pub indirect: bool,
    /// How many replacement rewrites away from the start set and goal a
    /// rewritten, conjoined or added formula may be.
    pub rewrite_radius: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 15,
            max_frontier: 50_000,
            max_formula_len: 25,
            addition_policy: AdditionPolicy::default(),
            indirect: false,
            rewrite_radius: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("search bound `{0}` must be positive")]
pub struct ConfigError(pub &'static str);

impl SearchConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("max_depth", self.max_depth),
            ("max_frontier", self.max_frontier),
            ("max_formula_len", self.max_formula_len),
        ] {
            if value == 0 {
                return Err(ConfigError(name));
            }
        }
        Ok(())
    }

    fn limits(&self, allow_contradiction: bool) -> Limits {
        Limits {
            max_depth: self.max_depth,
            max_frontier: self.max_frontier,
            max_formula_len: self.max_formula_len,
            rewrite_radius: self.rewrite_radius,
            allow_contradiction,
        }
    }

    fn addition_disjuncts(&self, problem: &Problem) -> Vec<Formula> {
        match self.addition_policy {
            AdditionPolicy::Disabled => Vec::new(),
            AdditionPolicy::SignatureAndConclusion => {
                EnumContext::new(problem.signature(), Some(problem.conclusion.clone()))
                    .addition_disjuncts()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchStatus {
    Found,
    /// Every reachable formula was explored without reaching the goal.
    Exhausted,
    /// A bound cut the search short.
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub proof: Option<Proof>,
    /// Distinct formulas generated, start set included.
    pub explored: usize,
    pub depth_reached: usize,
}

/// Searches for a proof of `problem` with the fewest steps, counting a
/// derivation as a tree.
///
/// # Panics
///
/// If `cfg` fails [`SearchConfig::validate`].
pub fn solve(problem: &Problem, cfg: &SearchConfig) -> SearchResult {
    cfg.validate().expect("invalid search config");
    let mut start: Vec<(StepRef, Formula)> = problem
        .premises
        .iter()
        .enumerate()
        .map(|(i, f)| (StepRef::Premise(i + 1), f.clone()))
        .collect();
    let (mode, goal) = if cfg.indirect {
        start.push((StepRef::Step(0), Formula::not(problem.conclusion.clone())));
        (ProofMode::Indirect, Formula::False)
    } else {
        (ProofMode::Direct, problem.conclusion.clone())
    };
    let run = Run::new(problem, cfg, start, goal);
    let mut result = run.search();
    let proof = result.steps.take().map(|steps| Proof::new(problem.clone(), steps, mode));
    if let Some(p) = &proof {
        debug_assert!(check_proof(p).complete, "search produced an unsound proof");
    }
    SearchResult {
        status: result.status,
        proof,
        explored: result.explored,
        depth_reached: result.depth_reached,
    }
}

/// The first step of a cheapest completion of `state`, or `None` when the
/// state already contains the conclusion or no completion is found within
/// bounds.
///
/// The completion starts from the premises and every derived statement, as
/// written by the student, so the hint never restates something already on
/// the page. Repeated statements are cited by their first occurrence.
pub fn next_step_hint(state: &Pss, cfg: &SearchConfig) -> Option<Hint> {
    cfg.validate().expect("invalid search config");
    let problem = &state.problem;
    if state.derived.iter().any(|s| s.formula == problem.conclusion) {
        return None;
    }
    let premises = problem.premises.iter().enumerate().map(|(i, f)| (StepRef::Premise(i + 1), f.clone()));
    let derived = state.derived.iter().enumerate().map(|(i, s)| (StepRef::Step(i + 1), s.formula.clone()));
    let start = premises.chain(derived).collect();
    let mut run = Run::new(problem, cfg, start, problem.conclusion.clone());
    run.first_index = state.derived.len() + 1;
    let steps = run.search().steps?;
    let mut step = steps.into_iter().next()?;
    step.index = state.derived.len() + 1;
    Some(Hint { step, explanation: None })
}

struct Run<'a> {
    problem: &'a Problem,
    cfg: &'a SearchConfig,
    start: Vec<(StepRef, Formula)>,
    goal: Formula,
    first_index: usize,
}

struct RunResult {
    status: SearchStatus,
    steps: Option<Vec<ProofStep>>,
    explored: usize,
    depth_reached: usize,
}

impl<'a> Run<'a> {
    /// `start` may repeat formulas; only the first occurrence is kept.
    fn new(problem: &'a Problem, cfg: &'a SearchConfig, start: Vec<(StepRef, Formula)>, goal: Formula) -> Self {
        let mut unique: Vec<(StepRef, Formula)> = Vec::with_capacity(start.len());
        for (r, f) in start {
            if !unique.iter().any(|(_, g)| *g == f) {
                unique.push((r, f));
            }
        }
        Run { problem, cfg, start: unique, goal, first_index: 1 }
    }

    fn search(&self) -> RunResult {
        let limits = self.cfg.limits(self.goal == Formula::False);
        let formulas: Vec<Formula> = self.start.iter().map(|(_, f)| f.clone()).collect();
        let mut engine = Engine::new(&limits, &formulas, &self.goal, self.cfg.addition_disjuncts(self.problem));
        let derivation = engine.run(&self.goal);
        let status = match derivation.outcome {
            Outcome::Found => SearchStatus::Found,
            Outcome::Exhausted => SearchStatus::Exhausted,
            Outcome::Truncated => SearchStatus::Truncated,
        };
        let steps = (status == SearchStatus::Found).then(|| self.to_steps(&engine, &derivation.steps));
        RunResult {
            status,
            steps,
            explored: engine.explored(),
            depth_reached: engine.depth_reached,
        }
    }

    fn to_steps(&self, engine: &Engine<'_>, edges: &[Edge]) -> Vec<ProofStep> {
        let n = self.start.len();
        let refer = |slot: u32| -> StepRef {
            let slot = slot as usize;
            if slot < n {
                self.start[slot].0
            } else {
                StepRef::Step(self.first_index + slot - n)
            }
        };
        edges
            .iter()
            .enumerate()
            .map(|(k, e)| ProofStep {
                index: self.first_index + k,
                formula: engine.formula(e.result).clone(),
                rule: e.rule,
                parents: e.parents.iter().map(|&p| refer(p)).collect(),
                site: e.site.clone(),
                direction: e.direction,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{found} atoms exceed the truth-table limit of {limit}")]
pub struct TooManyVariables {
    pub found: usize,
    pub limit: usize,
}

/// Largest varset [`entails`] will enumerate.
pub const ENTAILS_MAX_VARS: usize = 20;

/// True iff every assignment satisfying all `premises` satisfies `goal`.
pub fn entails(premises: &[Formula], goal: &Formula) -> Result<bool, TooManyVariables> {
    let atoms = atom_index(premises.iter().chain(std::iter::once(goal)));
    if atoms.len() > ENTAILS_MAX_VARS {
        return Err(TooManyVariables { found: atoms.len(), limit: ENTAILS_MAX_VARS });
    }
    for bits in 0u32..(1u32 << atoms.len()) {
        let lookup = |name: &str| atoms.iter().position(|a| a == name).map(|i| bits >> i & 1 == 1);
        let holds = |f: &Formula| f.evaluate_with(&lookup).expect("all atoms assigned");
        if premises.iter().all(holds) && !holds(goal) {
            return Ok(false);
        }
    }
    Ok(true)
}

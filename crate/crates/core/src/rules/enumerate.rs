//! Exhaustive enumeration of rule applications over a set of statements.

use std::collections::{BTreeSet, HashSet};

use crate::formula::Formula;

use super::schema;
use super::{RuleApplication, RuleId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumLimits {
    /// Results longer than this many nodes are dropped.
    pub max_result_len: usize,
    /// Enumeration stops (and reports truncation) after this many.
    pub max_applications: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits { max_result_len: 25, max_applications: 20_000 }
    }
}

/// Problem context that bounds Addition.
#[derive(Debug, Clone, Default)]
pub struct EnumContext {
    /// Atoms that Addition may introduce.
    pub signature: BTreeSet<String>,
    /// Subformulas of the conclusion are also offered as new disjuncts.
    pub conclusion: Option<Formula>,
}

impl EnumContext {
    pub fn new(signature: impl IntoIterator<Item = String>, conclusion: Option<Formula>) -> Self {
        EnumContext { signature: signature.into_iter().collect(), conclusion }
    }

    /// Candidate new disjuncts for Addition: signature atoms in name order,
    /// then conclusion subformulas in pre-order, without repeats.
    pub fn addition_disjuncts(&self) -> Vec<Formula> {
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for name in &self.signature {
            let atom = Formula::atom(name);
            if seen.insert(atom.clone()) {
                out.push(atom);
            }
        }
        if let Some(conclusion) = &self.conclusion {
            for sub in conclusion.subformulas() {
                if seen.insert(sub.clone()) {
                    out.push(sub);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct Enumeration {
    pub applications: Vec<RuleApplication>,
    pub truncated: bool,
}

struct Collector<'a> {
    limits: &'a EnumLimits,
    out: Enumeration,
}

impl Collector<'_> {
    /// Returns false once the application budget is spent.
    fn push(&mut self, app: RuleApplication) -> bool {
        if app.result.len() > self.limits.max_result_len {
            return true;
        }
        if self.out.applications.len() >= self.limits.max_applications {
            self.out.truncated = true;
            return false;
        }
        self.out.applications.push(app);
        true
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Every application of every rule to `known`, in canonical order: rule id,
/// then parent indices, then site (pre-order) and direction.
///
/// Parents of multi-parent rules are distinct statements. Addition draws its
/// new disjunct from [`EnumContext::addition_disjuncts`].
pub fn enumerate_applications(
    known: &[Formula],
    context: &EnumContext,
    limits: &EnumLimits,
) -> Enumeration {
    let mut c = Collector { limits, out: Enumeration::default() };
    let n = known.len();
    let two = |rule: RuleId, i: usize, j: usize, result: Formula| {
        RuleApplication::inference(rule, vec![known[i].clone(), known[j].clone()], result)
    };

    'rules: for rule in RuleId::ALL {
        match rule {
            RuleId::MP | RuleId::MT | RuleId::DS | RuleId::HS | RuleId::Conj | RuleId::Contra => {
                for (i, j) in pairs(n) {
                    let result = match rule {
                        RuleId::MP => schema::modus_ponens(&known[i], &known[j]),
                        RuleId::MT => schema::modus_tollens(&known[i], &known[j]),
                        RuleId::DS => schema::disjunctive_syllogism(&known[i], &known[j]),
                        RuleId::HS => schema::hypothetical_syllogism(&known[i], &known[j]),
                        RuleId::Conj => Some(schema::conjunction(&known[i], &known[j])),
                        _ => schema::contradiction(&known[i], &known[j]),
                    };
                    if let Some(result) = result {
                        if !c.push(two(rule, i, j, result)) {
                            break 'rules;
                        }
                    }
                }
            }
            RuleId::Simp => {
                for p in known {
                    if let Some(result) = schema::simplification(p) {
                        if !c.push(RuleApplication::inference(rule, vec![p.clone()], result)) {
                            break 'rules;
                        }
                    }
                }
            }
            RuleId::Add => {
                let disjuncts = context.addition_disjuncts();
                for p in known {
                    for d in &disjuncts {
                        for result in schema::addition(p, d) {
                            if !c.push(RuleApplication::inference(rule, vec![p.clone()], result)) {
                                break 'rules;
                            }
                        }
                    }
                }
            }
            RuleId::CD => {
                for (i, j) in pairs(n) {
                    for k in (0..n).filter(|&k| k != i && k != j) {
                        if let Some(result) =
                            schema::constructive_dilemma(&known[i], &known[j], &known[k])
                        {
                            let parents = vec![known[i].clone(), known[j].clone(), known[k].clone()];
                            if !c.push(RuleApplication::inference(rule, parents, result)) {
                                break 'rules;
                            }
                        }
                    }
                }
            }
            RuleId::Com | RuleId::DeM | RuleId::Impl | RuleId::DN | RuleId::CP => {
                for p in known {
                    for site in p.sites() {
                        for &direction in schema::directions(rule) {
                            if let Some(result) = schema::rewrite_at(rule, direction, p, &site) {
                                let app = RuleApplication::replacement(
                                    rule,
                                    p.clone(),
                                    result,
                                    site.clone(),
                                    direction,
                                );
                                if !c.push(app) {
                                    break 'rules;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    c.out
}

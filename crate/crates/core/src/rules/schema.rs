//! Forward construction of rule results.
//!
//! Each function takes parents in schema order and returns the result when
//! the parents fit the schema. Enumeration and proof search build on these;
//! validation uses its own matcher so the two routes check each other.

use crate::formula::Formula;

use super::{Direction, RuleId};

pub fn modus_ponens(implication: &Formula, antecedent: &Formula) -> Option<Formula> {
    match implication {
        Formula::Implies(p, q) if **p == *antecedent => Some((**q).clone()),
        _ => None,
    }
}

pub fn modus_tollens(implication: &Formula, negated_consequent: &Formula) -> Option<Formula> {
    match (implication, negated_consequent) {
        (Formula::Implies(p, q), Formula::Not(nq)) if q == nq => Some(Formula::Not(p.clone())),
        _ => None,
    }
}

pub fn disjunctive_syllogism(disjunction: &Formula, negated_left: &Formula) -> Option<Formula> {
    match (disjunction, negated_left) {
        (Formula::Or(p, q), Formula::Not(np)) if p == np => Some((**q).clone()),
        _ => None,
    }
}

pub fn hypothetical_syllogism(first: &Formula, second: &Formula) -> Option<Formula> {
    match (first, second) {
        (Formula::Implies(p, q), Formula::Implies(q2, r)) if q == q2 => {
            Some(Formula::Implies(p.clone(), r.clone()))
        }
        _ => None,
    }
}

pub fn simplification(conjunction: &Formula) -> Option<Formula> {
    match conjunction {
        Formula::And(p, _) => Some((**p).clone()),
        _ => None,
    }
}

pub fn conjunction(left: &Formula, right: &Formula) -> Formula {
    Formula::and(left.clone(), right.clone())
}

/// Both placements of the new disjunct, deduplicated.
pub fn addition(statement: &Formula, disjunct: &Formula) -> Vec<Formula> {
    let left = Formula::or(statement.clone(), disjunct.clone());
    let right = Formula::or(disjunct.clone(), statement.clone());
    if left == right {
        vec![left]
    } else {
        vec![left, right]
    }
}

pub fn constructive_dilemma(
    first: &Formula,
    second: &Formula,
    disjunction: &Formula,
) -> Option<Formula> {
    match (first, second, disjunction) {
        (Formula::Implies(p, q), Formula::Implies(r, s), Formula::Or(p2, r2))
            if p == p2 && r == r2 =>
        {
            Some(Formula::Or(q.clone(), s.clone()))
        }
        _ => None,
    }
}

pub fn contradiction(statement: &Formula, negation: &Formula) -> Option<Formula> {
    match negation {
        Formula::Not(p) if **p == *statement => Some(Formula::False),
        _ => None,
    }
}

/// Rewrites the root of `f` with a replacement rule. Returns `None` when the
/// rule does not apply to that shape or `rule` is not a replacement rule.
pub fn rewrite(rule: RuleId, direction: Direction, f: &Formula) -> Option<Formula> {
    use Direction::*;
    match (rule, direction, f) {
        (RuleId::Com, _, Formula::Or(p, q)) => Some(Formula::Or(q.clone(), p.clone())),
        (RuleId::Com, _, Formula::And(p, q)) => Some(Formula::And(q.clone(), p.clone())),

        (RuleId::DeM, Forward, Formula::Not(inner)) => match &**inner {
            Formula::And(p, q) => Some(Formula::or(Formula::Not(p.clone()), Formula::Not(q.clone()))),
            Formula::Or(p, q) => Some(Formula::and(Formula::Not(p.clone()), Formula::Not(q.clone()))),
            _ => None,
        },
        (RuleId::DeM, Backward, Formula::Or(a, b)) => match (&**a, &**b) {
            (Formula::Not(p), Formula::Not(q)) => {
                Some(Formula::not(Formula::And(p.clone(), q.clone())))
            }
            _ => None,
        },
        (RuleId::DeM, Backward, Formula::And(a, b)) => match (&**a, &**b) {
            (Formula::Not(p), Formula::Not(q)) => {
                Some(Formula::not(Formula::Or(p.clone(), q.clone())))
            }
            _ => None,
        },

        (RuleId::Impl, Forward, Formula::Implies(p, q)) => {
            Some(Formula::Or(std::sync::Arc::new(Formula::Not(p.clone())), q.clone()))
        }
        (RuleId::Impl, Backward, Formula::Or(np, q)) => match &**np {
            Formula::Not(p) => Some(Formula::Implies(p.clone(), q.clone())),
            _ => None,
        },

        (RuleId::DN, Forward, Formula::Not(inner)) => match &**inner {
            Formula::Not(p) => Some((**p).clone()),
            _ => None,
        },
        (RuleId::DN, Backward, p) => Some(Formula::not(Formula::not(p.clone()))),

        (RuleId::CP, Forward, Formula::Implies(p, q)) => {
            Some(Formula::implies(Formula::Not(q.clone()), Formula::Not(p.clone())))
        }
        (RuleId::CP, Backward, Formula::Implies(nq, np)) => match (&**nq, &**np) {
            (Formula::Not(q), Formula::Not(p)) => Some(Formula::Implies(p.clone(), q.clone())),
            _ => None,
        },

        _ => None,
    }
}

/// Applies `rule` at `site` of `f`. `None` if the site is missing or the rule
/// does not fit the subformula there.
pub fn rewrite_at(rule: RuleId, direction: Direction, f: &Formula, site: &[usize]) -> Option<Formula> {
    let sub = f.at(site)?;
    let replaced = rewrite(rule, direction, sub)?;
    f.replace_at(site, replaced)
}

/// Directions worth trying for a replacement rule. Commutation is its own
/// inverse, so its backward direction adds nothing new.
pub fn directions(rule: RuleId) -> &'static [Direction] {
    if rule == RuleId::Com {
        &[Direction::Forward]
    } else {
        &Direction::BOTH
    }
}

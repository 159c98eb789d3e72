//! Checking a claimed rule application against its schema.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::formula::{Connective, Formula, Site};

use super::{format_site, Direction, RuleApplication, RuleError, RuleId, RuleKind};

/// Why an application does not fit its schema: the first schema slot that
/// failed to match, and a readable explanation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub slot: String,
    pub message: String,
}

impl Diagnosis {
    fn new(slot: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnosis { slot: slot.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.slot, self.message)
    }
}

/// How a valid application matched. For replacement rules the site and
/// direction are resolved even when the caller left them out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// `parents[parent_order[i]]` plays the i-th schema slot.
    pub parent_order: Vec<usize>,
    pub site: Option<Site>,
    pub direction: Option<Direction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Judgement {
    Valid(Witness),
    Invalid(Diagnosis),
}

impl Judgement {
    pub fn is_valid(&self) -> bool {
        matches!(self, Judgement::Valid(_))
    }

    pub fn diagnosis(&self) -> Option<&Diagnosis> {
        match self {
            Judgement::Invalid(d) => Some(d),
            Judgement::Valid(_) => None,
        }
    }
}

/// A failed match remembers how many schema slots matched before the
/// failure, so the most plausible reading of the parents is reported.
struct Miss {
    matched: usize,
    diagnosis: Diagnosis,
}

type SlotResult = Result<(), Miss>;

fn miss(matched: usize, slot: &str, message: String) -> SlotResult {
    Err(Miss { matched, diagnosis: Diagnosis::new(slot, message) })
}

fn expect_shape<'a>(
    f: &'a Formula,
    shape: Connective,
    matched: usize,
    slot: &str,
    what: &str,
) -> Result<(&'a Formula, Option<&'a Formula>), Miss> {
    if f.connective() != shape {
        return Err(Miss {
            matched,
            diagnosis: Diagnosis::new(slot, format!("expected {what}, got `{f}`")),
        });
    }
    Ok((f.child(0).expect("shape checked"), f.child(1)))
}

fn expect_eq(actual: &Formula, expected: &Formula, matched: usize, slot: &str) -> SlotResult {
    if actual == expected {
        Ok(())
    } else {
        miss(matched, slot, format!("expected `{expected}`, got `{actual}`"))
    }
}

fn match_inference(rule: RuleId, parents: &[&Formula], result: &Formula) -> SlotResult {
    match rule {
        RuleId::MP => {
            let (p, q) = expect_shape(parents[0], Connective::Implies, 0, "first parent", "an implication p -> q")?;
            expect_eq(parents[1], p, 1, "second parent (p)")?;
            expect_eq(result, q.unwrap(), 2, "result (q)")
        }
        RuleId::MT => {
            let (p, q) = expect_shape(parents[0], Connective::Implies, 0, "first parent", "an implication p -> q")?;
            let (nq, _) = expect_shape(parents[1], Connective::Not, 1, "second parent (~q)", "a negation")?;
            expect_eq(nq, q.unwrap(), 1, "second parent (~q)")?;
            let (np, _) = expect_shape(result, Connective::Not, 2, "result (~p)", "a negation")?;
            expect_eq(np, p, 2, "result (~p)")
        }
        RuleId::DS => {
            let (p, q) = expect_shape(parents[0], Connective::Or, 0, "first parent", "a disjunction p | q")?;
            let (np, _) = expect_shape(parents[1], Connective::Not, 1, "second parent (~p)", "the negated left disjunct")?;
            expect_eq(np, p, 1, "second parent (~p)")?;
            expect_eq(result, q.unwrap(), 2, "result (q)")
        }
        RuleId::HS => {
            let (p, q) = expect_shape(parents[0], Connective::Implies, 0, "first parent", "an implication p -> q")?;
            let (q2, r) = expect_shape(parents[1], Connective::Implies, 1, "second parent", "an implication q -> r")?;
            expect_eq(q2, q.unwrap(), 1, "second parent (q)")?;
            let (rp, rr) = expect_shape(result, Connective::Implies, 2, "result (p -> r)", "an implication")?;
            expect_eq(rp, p, 2, "result (p)")?;
            expect_eq(rr.unwrap(), r.unwrap(), 2, "result (r)")
        }
        RuleId::Simp => {
            let (p, _) = expect_shape(parents[0], Connective::And, 0, "parent", "a conjunction p & q")?;
            expect_eq(result, p, 1, "result (p)")
        }
        RuleId::Conj => {
            let (l, r) = expect_shape(result, Connective::And, 0, "result", "a conjunction p & q")?;
            expect_eq(l, parents[0], 1, "result (p)")?;
            expect_eq(r.unwrap(), parents[1], 2, "result (q)")
        }
        RuleId::Add => {
            let (l, r) = expect_shape(result, Connective::Or, 0, "result", "a disjunction containing the parent")?;
            if l == parents[0] || r.unwrap() == parents[0] {
                Ok(())
            } else {
                miss(1, "result (p)", format!("neither disjunct of `{result}` is `{}`", parents[0]))
            }
        }
        RuleId::CD => {
            let (p, q) = expect_shape(parents[0], Connective::Implies, 0, "first parent", "an implication p -> q")?;
            let (r, s) = expect_shape(parents[1], Connective::Implies, 1, "second parent", "an implication r -> s")?;
            let (dp, dr) = expect_shape(parents[2], Connective::Or, 2, "third parent", "a disjunction p | r")?;
            expect_eq(dp, p, 2, "third parent (p)")?;
            expect_eq(dr.unwrap(), r, 3, "third parent (r)")?;
            let (rq, rs) = expect_shape(result, Connective::Or, 4, "result (q | s)", "a disjunction")?;
            expect_eq(rq, q.unwrap(), 4, "result (q)")?;
            expect_eq(rs.unwrap(), s.unwrap(), 5, "result (s)")
        }
        RuleId::Contra => {
            let (p, _) = expect_shape(parents[1], Connective::Not, 0, "second parent (~p)", "a negation")?;
            expect_eq(p, parents[0], 1, "second parent (~p)")?;
            if *result == Formula::False {
                Ok(())
            } else {
                miss(2, "result", format!("expected `0`, got `{result}`"))
            }
        }
        _ => unreachable!("{rule} is a replacement rule"),
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    match n {
        1 => vec![vec![0]],
        2 => vec![vec![0, 1], vec![1, 0]],
        _ => {
            let mut out = Vec::new();
            for first in 0..n {
                for rest in permutations(n - 1) {
                    let mut perm = vec![first];
                    perm.extend(rest.into_iter().map(|i| if i >= first { i + 1 } else { i }));
                    out.push(perm);
                }
            }
            out
        }
    }
}

fn validate_inference(app: &RuleApplication) -> Judgement {
    let mut best: Option<Miss> = None;
    for order in permutations(app.parents.len()) {
        let ordered: Vec<&Formula> = order.iter().map(|&i| &app.parents[i]).collect();
        match match_inference(app.rule, &ordered, &app.result) {
            Ok(()) => {
                return Judgement::Valid(Witness { parent_order: order, site: None, direction: None })
            }
            Err(m) => {
                if best.as_ref().is_none_or(|b| m.matched > b.matched) {
                    best = Some(m);
                }
            }
        }
    }
    let best = best.expect("at least one ordering");
    Judgement::Invalid(Diagnosis::new(
        format!("{} {}", app.rule, best.diagnosis.slot),
        best.diagnosis.message,
    ))
}

/// True when `to` is what `rule` produces from `from` in `direction`, read
/// off the shapes of both sides.
fn is_rewrite(rule: RuleId, direction: Direction, from: &Formula, to: &Formula) -> bool {
    let (lhs, rhs) = match direction {
        Direction::Forward => (from, to),
        Direction::Backward => (to, from),
    };
    // Each arm reads `lhs` in the schema's left-hand form and `rhs` in its
    // right-hand form.
    match rule {
        RuleId::Com => match (lhs, rhs) {
            (Formula::Or(a, b), Formula::Or(c, d)) | (Formula::And(a, b), Formula::And(c, d)) => {
                a == d && b == c
            }
            _ => false,
        },
        RuleId::DeM => match (lhs, rhs) {
            (Formula::Not(inner), Formula::Or(x, y)) | (Formula::Not(inner), Formula::And(x, y)) => {
                let (p, q) = match (&**inner, rhs.connective()) {
                    (Formula::And(p, q), Connective::Or) | (Formula::Or(p, q), Connective::And) => (p, q),
                    _ => return false,
                };
                x.negated() == Some(&**p) && y.negated() == Some(&**q)
            }
            _ => false,
        },
        RuleId::Impl => match (lhs, rhs) {
            (Formula::Implies(p, q), Formula::Or(np, q2)) => np.negated() == Some(&**p) && q == q2,
            _ => false,
        },
        RuleId::DN => lhs.negated().and_then(Formula::negated) == Some(rhs),
        RuleId::CP => match (lhs, rhs) {
            (Formula::Implies(p, q), Formula::Implies(nq, np)) => {
                nq.negated() == Some(&**q) && np.negated() == Some(&**p)
            }
            _ => false,
        },
        _ => false,
    }
}

/// Walks `parent` and `result` along `site`. Everything off the path must be
/// identical; returns the two subformulas at the site.
fn split_at_site<'a>(
    parent: &'a Formula,
    result: &'a Formula,
    site: &[usize],
) -> Option<(&'a Formula, &'a Formula)> {
    let (mut a, mut b) = (parent, result);
    for &i in site {
        if a.connective() != b.connective() {
            return None;
        }
        for (j, (ca, cb)) in a.children().into_iter().zip(b.children()).enumerate() {
            if j != i && ca != cb {
                return None;
            }
        }
        a = a.child(i)?;
        b = b.child(i)?;
    }
    Some((a, b))
}

fn validate_replacement(app: &RuleApplication) -> Result<Judgement, RuleError> {
    let parent = &app.parents[0];
    let sites: Vec<Site> = match &app.site {
        Some(site) => {
            if parent.at(site).is_none() {
                return Err(RuleError::InvalidSite { site: site.clone(), formula: parent.clone() });
            }
            vec![site.clone()]
        }
        None => parent.sites(),
    };
    let directions: Vec<Direction> = match app.direction {
        Some(d) => vec![d],
        None => Direction::BOTH.to_vec(),
    };
    for site in &sites {
        let Some((from, to)) = split_at_site(parent, &app.result, site) else { continue };
        for &direction in &directions {
            if is_rewrite(app.rule, direction, from, to) {
                return Ok(Judgement::Valid(Witness {
                    parent_order: vec![0],
                    site: Some(site.clone()),
                    direction: Some(direction),
                }));
            }
        }
    }
    let where_ = match &app.site {
        Some(site) => format!("at site {}", format_site(site)),
        None => "at any site".to_string(),
    };
    let which = match app.direction {
        Some(d) => format!(" ({})", d.as_str()),
        None => String::new(),
    };
    Ok(Judgement::Invalid(Diagnosis::new(
        format!("{} rewrite", app.rule),
        format!("`{}` does not rewrite to `{}` {where_}{which}", parent, app.result),
    )))
}

/// Decides whether `app.result` follows from `app.parents` by `app.rule`.
///
/// Arity mismatches and sites that do not exist in the parent are errors; a
/// well-formed application that does not fit the schema is an
/// [`Judgement::Invalid`] naming the first slot that failed.
pub fn validate_application(app: &RuleApplication) -> Result<Judgement, RuleError> {
    let expected = app.rule.arity();
    if app.parents.len() != expected {
        return Err(RuleError::ArityMismatch {
            rule: app.rule,
            expected,
            found: app.parents.len(),
        });
    }
    match app.rule.kind() {
        RuleKind::Inference => {
            if app.site.as_ref().is_some_and(|s| !s.is_empty()) {
                return Err(RuleError::SiteOnInferenceRule(app.rule));
            }
            Ok(validate_inference(app))
        }
        RuleKind::Replacement => validate_replacement(app),
    }
}

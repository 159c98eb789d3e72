//! Propositional formulas.
//!
//! A [`Formula`] is an immutable tree over atoms, `~`, `&`, `|`, `->` and the
//! falsum constant `0`. Children are reference counted so rewriting one site
//! shares every untouched subtree with the original. Equality is structural;
//! nothing is normalized behind the caller's back.

mod parse;
mod print;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub use parse::{parse, ParseError, ParseErrorKind};

/// A propositional formula.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Arc<str>),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    /// The contradiction constant, printed `0`.
    False,
}

/// Top-level connective of a formula, without its children.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Connective {
    Atom,
    Not,
    And,
    Or,
    Implies,
    False,
}

/// A path from the root to a subformula: the child index taken at each node
/// (`0` for the only child of `~` and the left child of a binary connective,
/// `1` for the right child).
pub type Site = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no truth value assigned to atom `{0}`")]
    MissingVariable(String),
}

/// Size and vocabulary of a formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaMetrics {
    /// Number of nodes (atoms, constants and connectives).
    pub length: usize,
    pub varset: BTreeSet<String>,
}

/// Returns true if `name` is a legal atom name: `[A-Z][A-Za-z0-9_]*`.
pub fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Formula {
    /// Builds an atom.
    ///
    /// # Panics
    ///
    /// Panics if `name` is not a legal atom name. Use [`parse`] for untrusted
    /// input.
    pub fn atom(name: &str) -> Formula {
        assert!(is_atom_name(name), "illegal atom name {name:?}");
        Formula::Atom(Arc::from(name))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn connective(&self) -> Connective {
        match self {
            Formula::Atom(_) => Connective::Atom,
            Formula::Not(_) => Connective::Not,
            Formula::And(..) => Connective::And,
            Formula::Or(..) => Connective::Or,
            Formula::Implies(..) => Connective::Implies,
            Formula::False => Connective::False,
        }
    }

    /// Immediate children, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::False => Vec::new(),
            Formula::Not(a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => vec![a, b],
        }
    }

    pub fn child(&self, index: usize) -> Option<&Formula> {
        match (self, index) {
            (Formula::Not(a), 0) => Some(a),
            (Formula::And(a, _) | Formula::Or(a, _) | Formula::Implies(a, _), 0) => Some(a),
            (Formula::And(_, b) | Formula::Or(_, b) | Formula::Implies(_, b), 1) => Some(b),
            _ => None,
        }
    }

    /// Returns the operand if this is a negation.
    pub fn negated(&self) -> Option<&Formula> {
        match self {
            Formula::Not(a) => Some(a),
            _ => None,
        }
    }

    /// Number of nodes in the tree.
    pub fn len(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::False => 1,
            Formula::Not(a) => 1 + a.len(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.len() + b.len(),
        }
    }

    /// Always false; formulas have at least one node. Present for clippy's
    /// `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::False => 1,
            Formula::Not(a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    pub fn metrics(&self) -> FormulaMetrics {
        FormulaMetrics {
            length: self.len(),
            varset: self.atoms().into_iter().map(str::to_owned).collect(),
        }
    }

    /// Atom names occurring in the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::Atom(name) => {
                out.insert(name);
            }
            Formula::False => {}
            Formula::Not(a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Evaluates under an assignment that must cover every atom.
    pub fn evaluate(&self, assignment: &HashMap<String, bool>) -> Result<bool, EvalError> {
        self.evaluate_with(&|name| assignment.get(name).copied())
    }

    /// Evaluates with a lookup function for atom values.
    pub fn evaluate_with(&self, lookup: &dyn Fn(&str) -> Option<bool>) -> Result<bool, EvalError> {
        Ok(match self {
            Formula::Atom(name) => {
                lookup(name).ok_or_else(|| EvalError::MissingVariable(name.to_string()))?
            }
            Formula::False => false,
            Formula::Not(a) => !a.evaluate_with(lookup)?,
            Formula::And(a, b) => a.evaluate_with(lookup)? && b.evaluate_with(lookup)?,
            Formula::Or(a, b) => a.evaluate_with(lookup)? || b.evaluate_with(lookup)?,
            Formula::Implies(a, b) => !a.evaluate_with(lookup)? || b.evaluate_with(lookup)?,
        })
    }

    /// Every site in pre-order, starting with the root (`[]`).
    pub fn sites(&self) -> Vec<Site> {
        let mut out = Vec::with_capacity(self.len());
        let mut path = Vec::new();
        self.collect_sites(&mut path, &mut out);
        out
    }

    fn collect_sites(&self, path: &mut Site, out: &mut Vec<Site>) {
        out.push(path.clone());
        for (i, child) in self.children().into_iter().enumerate() {
            path.push(i);
            child.collect_sites(path, out);
            path.pop();
        }
    }

    /// The subformula at `site`, if the path exists.
    pub fn at(&self, site: &[usize]) -> Option<&Formula> {
        site.iter().try_fold(self, |f, &i| f.child(i))
    }

    /// A copy with the subformula at `site` replaced. Returns `None` if the
    /// path does not exist.
    pub fn replace_at(&self, site: &[usize], replacement: Formula) -> Option<Formula> {
        let Some((&first, rest)) = site.split_first() else {
            return Some(replacement);
        };
        let rebuild = |child: &Arc<Formula>| child.replace_at(rest, replacement.clone()).map(Arc::new);
        match (self, first) {
            (Formula::Not(a), 0) => Some(Formula::Not(rebuild(a)?)),
            (Formula::And(a, b), 0) => Some(Formula::And(rebuild(a)?, b.clone())),
            (Formula::And(a, b), 1) => Some(Formula::And(a.clone(), rebuild(b)?)),
            (Formula::Or(a, b), 0) => Some(Formula::Or(rebuild(a)?, b.clone())),
            (Formula::Or(a, b), 1) => Some(Formula::Or(a.clone(), rebuild(b)?)),
            (Formula::Implies(a, b), 0) => Some(Formula::Implies(rebuild(a)?, b.clone())),
            (Formula::Implies(a, b), 1) => Some(Formula::Implies(a.clone(), rebuild(b)?)),
            _ => None,
        }
    }

    /// All distinct subformulas, including the formula itself.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        self.collect_subformulas(&mut seen, &mut out);
        out
    }

    fn collect_subformulas<'a>(
        &'a self,
        seen: &mut std::collections::HashSet<&'a Formula>,
        out: &mut Vec<Formula>,
    ) {
        if !seen.insert(self) {
            return;
        }
        out.push(self.clone());
        for child in self.children() {
            child.collect_subformulas(seen, out);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_formula(f, self)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Canonical minimal-parentheses rendering.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

/// Assigns every atom of `formulas` a bit position, in sorted name order.
/// Used by truth-table checks.
pub fn atom_index<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Vec<String> {
    let mut all = BTreeSet::new();
    for f in formulas {
        for a in f.atoms() {
            all.insert(a.to_owned());
        }
    }
    all.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn metrics_examples() {
        let m = f("P").metrics();
        assert_eq!(m.length, 1);
        assert_eq!(m.varset, BTreeSet::from(["P".to_string()]));

        let m = f("P -> Q").metrics();
        assert_eq!(m.length, 3);
        assert_eq!(m.varset.len(), 2);

        let m = f("~(A & B)").metrics();
        assert_eq!(m.length, 4);
        assert_eq!(m.varset, BTreeSet::from(["A".to_string(), "B".to_string()]));

        let m = Formula::False.metrics();
        assert_eq!(m.length, 1);
        assert!(m.varset.is_empty());
    }

    #[test]
    fn evaluate_examples() {
        let sigma = HashMap::from([("P".to_string(), true), ("Q".to_string(), false)]);
        assert!(!f("P -> Q").evaluate(&sigma).unwrap());
        assert!(!Formula::False.evaluate(&HashMap::new()).unwrap());
        let sigma = HashMap::from([("P".to_string(), false)]);
        assert!(f("P | ~P").evaluate(&sigma).unwrap());
    }

    #[test]
    fn evaluate_reports_missing_atom() {
        let sigma = HashMap::from([("P".to_string(), true)]);
        assert_eq!(
            f("P & Rain").evaluate(&sigma),
            Err(EvalError::MissingVariable("Rain".into()))
        );
    }

    #[test]
    fn sites_and_replacement() {
        let g = f("(A -> B) & ~C");
        assert_eq!(g.sites().len(), g.len());
        assert_eq!(g.at(&[0, 1]), Some(&f("B")));
        assert_eq!(g.at(&[1, 0]), Some(&f("C")));
        assert_eq!(g.at(&[1, 1]), None);
        assert_eq!(g.replace_at(&[1, 0], f("D | E")), Some(f("(A -> B) & ~(D | E)")));
        assert_eq!(g.replace_at(&[2], f("D")), None);
    }

    #[test]
    fn subformulas_are_distinct() {
        let subs = f("A & A").subformulas();
        assert_eq!(subs, vec![f("A & A"), f("A")]);
    }

    #[test]
    fn serde_uses_surface_syntax() {
        let json = serde_json::to_string(&f("~(P & Q) -> R")).unwrap();
        assert_eq!(json, "\"~(P & Q) -> R\"");
        let back: Formula = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f("~(P & Q) -> R"));
        assert!(serde_json::from_str::<Formula>("\"P &\"").is_err());
    }
}

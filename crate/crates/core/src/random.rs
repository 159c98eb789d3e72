//! Seeded generators for formulas, rule applications and problems.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::Formula;
use crate::kernel::{Level, Problem};
use crate::rules::schema;
use crate::rules::{Direction, RuleApplication, RuleId};

/// Seed used when callers do not pick one.
pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Atom names `A`, `B`, ... up to `n` (at most 26).
pub fn atom_names(n: usize) -> Vec<String> {
    (b'A'..=b'Z').take(n.min(26)).map(|c| (c as char).to_string()).collect()
}

/// A random formula of depth at most `max_depth` (an atom has depth 1) over
/// `atoms`. The constant `0` appears only when `allow_false` is set.
pub fn formula<R: Rng>(rng: &mut R, max_depth: usize, atoms: &[String], allow_false: bool) -> Formula {
    if max_depth <= 1 || rng.random_bool(0.25) {
        if allow_false && rng.random_bool(0.05) {
            return Formula::False;
        }
        return Formula::atom(atoms.choose(rng).expect("at least one atom"));
    }
    let d = max_depth - 1;
    match rng.random_range(0..4) {
        0 => Formula::not(formula(rng, d, atoms, allow_false)),
        1 => Formula::and(formula(rng, d, atoms, allow_false), formula(rng, d, atoms, allow_false)),
        2 => Formula::or(formula(rng, d, atoms, allow_false), formula(rng, d, atoms, allow_false)),
        _ => Formula::implies(formula(rng, d, atoms, allow_false), formula(rng, d, atoms, allow_false)),
    }
}

fn small<R: Rng>(rng: &mut R, atoms: &[String]) -> Formula {
    formula(rng, 3, atoms, false)
}

/// The left-hand side of a replacement schema, instantiated with random
/// subformulas, so that `rule` applies at its root in `direction`.
fn rewrite_source<R: Rng>(rng: &mut R, rule: RuleId, direction: Direction, atoms: &[String]) -> Formula {
    let p = small(rng, atoms);
    let q = small(rng, atoms);
    use Direction::*;
    match (rule, direction) {
        (RuleId::Com, _) => {
            if rng.random_bool(0.5) {
                Formula::and(p, q)
            } else {
                Formula::or(p, q)
            }
        }
        (RuleId::DeM, Forward) => {
            if rng.random_bool(0.5) {
                Formula::not(Formula::and(p, q))
            } else {
                Formula::not(Formula::or(p, q))
            }
        }
        (RuleId::DeM, Backward) => {
            let (np, nq) = (Formula::not(p), Formula::not(q));
            if rng.random_bool(0.5) {
                Formula::or(np, nq)
            } else {
                Formula::and(np, nq)
            }
        }
        (RuleId::Impl, Forward) | (RuleId::CP, Forward) => Formula::implies(p, q),
        (RuleId::Impl, Backward) => Formula::or(Formula::not(p), q),
        (RuleId::DN, Forward) => Formula::not(Formula::not(p)),
        (RuleId::DN, Backward) => p,
        (RuleId::CP, Backward) => Formula::implies(Formula::not(q), Formula::not(p)),
        _ => unreachable!("{rule} is not a replacement rule"),
    }
}

/// Puts `inner` at a random position inside a random context of depth up
/// to `context_depth`. Returns the whole formula and the site of `inner`.
fn embed<R: Rng>(rng: &mut R, inner: Formula, context_depth: usize, atoms: &[String]) -> (Formula, Vec<usize>) {
    let mut f = inner;
    let mut site = Vec::new();
    for _ in 0..rng.random_range(0..=context_depth) {
        let other = small(rng, atoms);
        let (wrapped, index) = match rng.random_range(0..7) {
            0 => (Formula::not(f), 0),
            1 => (Formula::and(f, other), 0),
            2 => (Formula::and(other, f), 1),
            3 => (Formula::or(f, other), 0),
            4 => (Formula::or(other, f), 1),
            5 => (Formula::implies(f, other), 0),
            _ => (Formula::implies(other, f), 1),
        };
        f = wrapped;
        site.insert(0, index);
    }
    (f, site)
}

/// A random application of `rule` that fits its schema. Parents come in
/// schema order.
pub fn application<R: Rng>(rng: &mut R, rule: RuleId, atoms: &[String]) -> RuleApplication {
    let p = small(rng, atoms);
    let q = small(rng, atoms);
    let inference = |parents: Vec<Formula>, result: Formula| RuleApplication::inference(rule, parents, result);
    match rule {
        RuleId::MP => inference(vec![Formula::implies(p.clone(), q.clone()), p], q),
        RuleId::MT => inference(
            vec![Formula::implies(p.clone(), q.clone()), Formula::not(q)],
            Formula::not(p),
        ),
        RuleId::DS => inference(vec![Formula::or(p.clone(), q.clone()), Formula::not(p)], q),
        RuleId::HS => {
            let r = small(rng, atoms);
            inference(
                vec![Formula::implies(p.clone(), q.clone()), Formula::implies(q, r.clone())],
                Formula::implies(p, r),
            )
        }
        RuleId::Simp => inference(vec![Formula::and(p.clone(), q)], p),
        RuleId::Conj => inference(vec![p.clone(), q.clone()], Formula::and(p, q)),
        RuleId::Add => {
            let result = if rng.random_bool(0.5) {
                Formula::or(p.clone(), q)
            } else {
                Formula::or(q, p.clone())
            };
            inference(vec![p], result)
        }
        RuleId::CD => {
            let r = small(rng, atoms);
            let s = small(rng, atoms);
            inference(
                vec![
                    Formula::implies(p.clone(), q.clone()),
                    Formula::implies(r.clone(), s.clone()),
                    Formula::or(p, r),
                ],
                Formula::or(q, s),
            )
        }
        RuleId::Contra => inference(vec![p.clone(), Formula::not(p)], Formula::False),
        RuleId::Com | RuleId::DeM | RuleId::Impl | RuleId::DN | RuleId::CP => {
            let direction = *schema::directions(rule).choose(rng).expect("nonempty");
            let source = rewrite_source(rng, rule, direction, atoms);
            let (parent, site) = embed(rng, source, 3, atoms);
            let result = schema::rewrite_at(rule, direction, &parent, &site).expect("schema applies at site");
            RuleApplication::replacement(rule, parent, result, site, direction)
        }
    }
}

/// Applications cycling through all rules in canonical order.
pub fn applications<R: Rng>(rng: &mut R, count: usize, atoms: &[String]) -> Vec<RuleApplication> {
    (0..count).map(|i| application(rng, RuleId::ALL[i % RuleId::ALL.len()], atoms)).collect()
}

/// A random problem whose conclusion is built by chaining random rule
/// applications forward from random premises, so it is provable. Used by
/// `solve --fuzz`.
pub fn problem<R: Rng>(rng: &mut R, id: &str, steps: usize, atoms: &[String]) -> Problem {
    loop {
        let mut known: Vec<Formula> = (0..rng.random_range(2..=4)).map(|_| small(rng, atoms)).collect();
        let premises = known.clone();
        for _ in 0..steps {
            let rule = *[RuleId::MP, RuleId::Simp, RuleId::Conj, RuleId::DN, RuleId::Add, RuleId::Com]
                .choose(rng)
                .expect("nonempty");
            let a = known.choose(rng).expect("nonempty").clone();
            let b = known.choose(rng).expect("nonempty").clone();
            let next = match rule {
                RuleId::MP => schema::modus_ponens(&a, &b),
                RuleId::Simp => schema::simplification(&a),
                RuleId::Conj => Some(schema::conjunction(&a, &b)),
                RuleId::DN => schema::rewrite(RuleId::DN, Direction::Forward, &a),
                RuleId::Add => Some(Formula::or(a, Formula::atom(atoms.choose(rng).expect("nonempty")))),
                _ => schema::rewrite(RuleId::Com, Direction::Forward, &a),
            };
            if let Some(f) = next.filter(|f| f.len() <= 12) {
                known.push(f);
            }
        }
        let conclusion = known.last().expect("nonempty").clone();
        if let Ok(p) = Problem::new(id, premises, conclusion, Level::Train1) {
            return p;
        }
    }
}

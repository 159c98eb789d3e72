#![allow(dead_code)]

use logichint_core::formula::Formula;
use proptest::prelude::*;

pub fn atom() -> impl Strategy<Value = Formula> {
    prop::sample::select(vec!["A", "B", "C", "D", "E", "F"]).prop_map(Formula::atom)
}

/// Formulas of depth at most `depth` over six atoms.
pub fn formula(depth: u32) -> impl Strategy<Value = Formula> {
    atom().prop_recursive(depth.saturating_sub(1), 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

/// Truth value under `bits`, where atom `A` is bit 0, `B` bit 1, and so on.
/// Written against the enum directly so it shares no code with the crate's
/// evaluator.
pub fn truth(f: &Formula, bits: u32) -> bool {
    match f {
        Formula::Atom(name) => {
            let i = name.as_bytes()[0] - b'A';
            bits >> i & 1 == 1
        }
        Formula::False => false,
        Formula::Not(a) => !truth(a, bits),
        Formula::And(a, b) => truth(a, bits) && truth(b, bits),
        Formula::Or(a, b) => truth(a, bits) || truth(b, bits),
        Formula::Implies(a, b) => !truth(a, bits) || truth(b, bits),
    }
}

/// Every assignment over atoms `A`..`H` that satisfies all `premises`
/// satisfies `goal`.
pub fn entailed(premises: &[Formula], goal: &Formula) -> bool {
    (0u32..1 << 8).all(|bits| !premises.iter().all(|p| truth(p, bits)) || truth(goal, bits))
}

pub fn equivalent(a: &Formula, b: &Formula) -> bool {
    (0u32..1 << 8).all(|bits| truth(a, bits) == truth(b, bits))
}

use logichint_core::kernel::{Problem, ProofStep, Pss, StepRef};
use logichint_core::rules::{enumerate_applications, validate_application, EnumContext, EnumLimits, Judgement};
use rand::Rng;

/// Extends `state` by `steps` random valid steps drawn from the enumerated
/// applications over everything known so far.
pub fn random_walk<R: Rng>(state: &Pss, steps: usize, rng: &mut R) -> Pss {
    let mut state = state.clone();
    let ctx = EnumContext::new(state.problem.signature(), Some(state.problem.conclusion.clone()));
    let limits = EnumLimits { max_result_len: 14, max_applications: 5_000 };
    for _ in 0..steps {
        let mut known: Vec<(StepRef, logichint_core::formula::Formula)> = state
            .problem
            .premises
            .iter()
            .enumerate()
            .map(|(i, f)| (StepRef::Premise(i + 1), f.clone()))
            .collect();
        known.extend(state.derived.iter().enumerate().map(|(i, s)| (StepRef::Step(i + 1), s.formula.clone())));
        let formulas: Vec<_> = known.iter().map(|(_, f)| f.clone()).collect();
        let apps = enumerate_applications(&formulas, &ctx, &limits).applications;
        let apps: Vec<_> = apps.into_iter().filter(|a| !state.contains(&a.result)).collect();
        if apps.is_empty() {
            break;
        }
        let app = &apps[rng.random_range(0..apps.len())];
        assert!(matches!(validate_application(app), Ok(Judgement::Valid(_))));
        let refs = app
            .parents
            .iter()
            .map(|p| known.iter().find(|(_, f)| f == p).expect("parent is known").0)
            .collect();
        let step = ProofStep {
            index: state.derived.len() + 1,
            formula: app.result.clone(),
            rule: app.rule,
            parents: refs,
            site: app.site.clone(),
            direction: app.direction,
        };
        state = state.with_step(&step);
    }
    state
}

pub fn problem(premises: &[&str], conclusion: &str) -> Problem {
    use logichint_core::formula::parse;
    Problem::new(
        "t",
        premises.iter().map(|p| parse(p).unwrap()).collect(),
        parse(conclusion).unwrap(),
        logichint_core::kernel::Level::Train1,
    )
    .unwrap()
}

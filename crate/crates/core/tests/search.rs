mod common;

use std::time::Instant;

use logichint_core::data;
use logichint_core::formula::{parse, Formula};
use logichint_core::kernel::{check_proof, validate_hint, ProofStep, Pss, StepRef};
use logichint_core::random;
use logichint_core::rules::RuleId;
use logichint_core::search::{entails, next_step_hint, solve, SearchConfig, SearchStatus, TooManyVariables};

#[test]
fn no_one_step_proof_of_the_chain() {
    let p = common::problem(&["A -> B", "B -> C", "A"], "C");
    let r = solve(&p, &SearchConfig::default());
    assert_eq!(r.status, SearchStatus::Found);
    assert_eq!(r.proof.unwrap().steps.len(), 2);
    // With one layer only, nothing is found.
    let shallow = SearchConfig { max_depth: 1, ..SearchConfig::default() };
    assert_ne!(solve(&p, &shallow).status, SearchStatus::Found);
}

#[test]
fn search_is_deterministic() {
    let cfg = SearchConfig::default();
    for p in data::lt20().problems.iter().skip(10) {
        assert_eq!(solve(p, &cfg), solve(p, &cfg));
    }
}

#[test]
fn bundled_problems_are_solved_within_defaults() {
    let start = Instant::now();
    for p in &data::lt20().problems {
        let r = solve(p, &SearchConfig::default());
        assert_eq!(r.status, SearchStatus::Found, "{}", p.id);
        assert!(check_proof(r.proof.as_ref().unwrap()).complete, "{}", p.id);
    }
    assert!(start.elapsed().as_secs() < 120);
}

#[test]
fn found_proofs_are_entailed_and_unprovable_goals_are_not_found() {
    let mut rng = random::rng(31);
    let atoms = random::atom_names(4);
    let cfg = SearchConfig { max_depth: 4, max_frontier: 4_000, ..SearchConfig::default() };
    for i in 0..40 {
        // The generator may repeat a premise, which search must tolerate.
        let mut p = random::problem(&mut rng, &format!("fuzz-{i}"), 4, &atoms);
        if i % 2 == 1 {
            // Swap in a random goal that may or may not follow.
            let goal = random::formula(&mut rng, 2, &atoms, false);
            if p.premises.contains(&goal) {
                continue;
            }
            p.conclusion = goal;
        }
        let r = solve(&p, &cfg);
        let holds = common::entailed(&p.premises, &p.conclusion);
        if r.status == SearchStatus::Found {
            assert!(holds, "{p:?}");
            assert!(check_proof(r.proof.as_ref().unwrap()).complete);
        }
    }
}

#[test]
fn hint_ignores_redundant_statements() {
    let p = common::problem(&["A -> B", "B -> C", "A"], "C");
    let mut state = Pss::initial(p);
    for s in [
        ProofStep::new(1, parse("A | D").unwrap(), RuleId::Add, vec![StepRef::Premise(3)]),
        ProofStep::new(2, parse("A -> C").unwrap(), RuleId::HS, vec![StepRef::Premise(1), StepRef::Premise(2)]),
    ] {
        state = state.with_step(&s);
    }
    let hint = next_step_hint(&state, &SearchConfig::default()).unwrap();
    assert_eq!(hint.step.formula, Formula::atom("C"));
    assert_eq!(hint.step.parents, vec![StepRef::Step(2), StepRef::Premise(3)]);
    assert!(validate_hint(&state, &hint.step).is_correct());
}

#[test]
fn hints_for_states_with_invalid_steps_are_still_correct() {
    let p = common::problem(&["A -> B", "A"], "B | C");
    // S1 claims B by the wrong rule.
    let state = Pss::initial(p).with_step(&ProofStep::new(
        1,
        parse("B").unwrap(),
        RuleId::MT,
        vec![StepRef::Premise(1), StepRef::Premise(2)],
    ));
    let hint = next_step_hint(&state, &SearchConfig::default()).unwrap();
    assert_eq!(hint.step.formula, parse("B | C").unwrap());
    assert!(validate_hint(&state, &hint.step).is_correct());
}

#[test]
fn hints_along_random_detours_lead_to_the_goal() {
    let mut rng = random::rng(44);
    let cfg = SearchConfig::default();
    for p in data::lt20().problems.iter().step_by(3) {
        let mut state = common::random_walk(&Pss::initial(p.clone()), 4, &mut rng);
        for _ in 0..cfg.max_depth {
            if state.is_solved() {
                break;
            }
            let hint = next_step_hint(&state, &cfg).expect("hint exists");
            assert!(validate_hint(&state, &hint.step).is_correct());
            state = state.with_step(&hint.step);
        }
        assert!(state.is_solved(), "{}", p.id);
    }
}

#[test]
fn entails_guards_the_variable_count() {
    let many: Vec<Formula> = (0..21).map(|i| Formula::atom(&format!("X{i}"))).collect();
    let goal = Formula::atom("X0");
    assert_eq!(entails(&many, &goal), Err(TooManyVariables { found: 21, limit: 20 }));
    assert!(entails(&many[..20], &goal).unwrap());
}

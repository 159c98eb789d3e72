//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Tolerances and time budgets are pinned below.
//!
//! Prompt golden files live in `tests/golden/prompts`; `LOGICHINT_BLESS=1`
//! rewrites them.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use logichint_core::data::{lt20, lt20_solutions};
use logichint_core::formula::parse;
use logichint_core::kernel::{check_proof, from_document, validate_hint, ProofStep, Pss};
use logichint_core::random::{applications, atom_names, formula, rng, DEFAULT_SEED};
use logichint_core::rules::{validate_application, RuleId};
use logichint_core::search::{entails, next_step_hint, solve, SearchConfig, SearchStatus};
use logichint_eval::stats::{qwk, spearman, welch_t};
use logichint_prompt::{Forge, Strategy, Task};
use rand::Rng;
use serde::Deserialize;
use serde_json::Value;

/// Absolute tolerance for statistics compared with an oracle.
const STATS_TOL: f64 = 1e-9;
const SOUNDNESS_BUDGET: Duration = Duration::from_secs(10);
const ROUND_TRIP_BUDGET: Duration = Duration::from_secs(5);
const SEARCH_BUDGET: Duration = Duration::from_secs(120);
const LIVENESS_BUDGET: Duration = Duration::from_secs(120);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().unwrap()
}

fn rule_soundness() -> Outcome {
    let mut r = rng(DEFAULT_SEED);
    let atoms = atom_names(6);
    let apps = applications(&mut r, 1000, &atoms);
    let mut rules = BTreeSet::new();
    let mut equivalences = 0;
    for (i, app) in apps.iter().enumerate() {
        validate_application(app).map_err(|e| format!("application {i} ({}) rejected: {e}", app.rule))?;
        let vars: BTreeSet<&str> = app.parents.iter().chain([&app.result]).flat_map(|f| f.atoms()).collect();
        ensure(vars.len() <= 8, || format!("application {i} has {} variables", vars.len()))?;
        // For Contra the result is 0, so this asks that the parents be
        // jointly unsatisfiable.
        let sound = entails(&app.parents, &app.result).map_err(|e| e.to_string())?;
        ensure(sound, || format!("application {i} ({}) is unsound: {:?}", app.rule, app))?;
        if app.rule.is_replacement() {
            let back = entails(std::slice::from_ref(&app.result), &app.parents[0]).map_err(|e| e.to_string())?;
            ensure(back, || format!("replacement {i} ({}) is not an equivalence", app.rule))?;
            equivalences += 1;
        }
        rules.insert(app.rule);
    }
    ensure(rules.len() == RuleId::ALL.len(), || format!("only {} rules covered", rules.len()))?;
    Ok(format!("1000/1000 sound over {} rules, {equivalences} replacements are equivalences", rules.len()))
}

fn parser_round_trip() -> Outcome {
    let mut r = rng(DEFAULT_SEED);
    let atoms = atom_names(5);
    let mut deepest = 0;
    for i in 0..10_000 {
        let f = formula(&mut r, 8, &atoms, true);
        deepest = deepest.max(f.depth());
        let text = f.to_string();
        let back = parse(&text).map_err(|e| format!("formula {i} `{text}` does not parse: {e}"))?;
        ensure(back == f, || format!("formula {i} `{text}` reparses as `{back}`"))?;
    }
    ensure(deepest <= 8, || format!("generated depth {deepest}"))?;
    Ok(format!("10000/10000 round-trip, max depth {deepest}"))
}

fn search_completeness() -> Outcome {
    let cfg = SearchConfig::default();
    let solutions = lt20_solutions();
    let (mut found, mut steps, mut reference) = (0, 0, 0);
    for p in &lt20().problems {
        let result = solve(p, &cfg);
        ensure(result.status == SearchStatus::Found, || format!("{}: {:?}", p.id, result.status))?;
        let proof = result.proof.as_ref().expect("found proofs are returned");
        let report = check_proof(proof);
        ensure(report.complete && report.valid_steps == report.total_steps, || format!("{}: proof fails the checker", p.id))?;
        found += 1;
        steps += proof.steps.len();
        reference += solutions.get(&p.id).map_or(0, |s| s.steps.len());
    }
    Ok(format!("{found}/20 solved and checked, {steps} steps against {reference} in the reference solutions"))
}

fn hint_liveness() -> Outcome {
    let cfg = SearchConfig::default();
    let solutions = lt20_solutions();
    let (mut states, mut hints) = (0, 0);
    for p in &lt20().problems {
        let steps = &solutions.get(&p.id).ok_or(format!("{}: no reference solution", p.id))?.steps;
        for k in 0..steps.len() {
            states += 1;
            let mut state = Pss::new(p.clone(), steps[..k].to_vec());
            let mut rounds = 0;
            while !state.derived.iter().any(|s| s.formula == p.conclusion) {
                rounds += 1;
                ensure(rounds <= 30, || format!("{} after {k}: hints do not reach the goal", p.id))?;
                let hint = next_step_hint(&state, &cfg).ok_or(format!("{} after {k}: no hint", p.id))?;
                let verdict = validate_hint(&state, &hint.step);
                ensure(verdict.is_correct(), || format!("{} after {k}: hint is {}", p.id, verdict.label()))?;
                hints += 1;
                state = state.with_step(&hint.step);
            }
        }
    }
    ensure(states >= 100, || format!("only {states} states"))?;
    Ok(format!("{states}/{states} states get a correct hint, {hints} hints followed to the goal"))
}

#[derive(Deserialize)]
struct CraftedCase {
    id: String,
    problem: String,
    steps_done: usize,
    hint: ProofStep,
    reason: String,
}

#[derive(Deserialize)]
struct Crafted {
    cases: Vec<CraftedCase>,
}

fn crafted_hints() -> Outcome {
    let text = std::fs::read_to_string(root().join("data/fixtures/hints30.json")).map_err(|e| e.to_string())?;
    let crafted: Crafted = from_document(&text).map_err(|e| e.to_string())?;
    let problems = lt20();
    let solutions = lt20_solutions();
    let mut per_reason: BTreeMap<String, usize> = BTreeMap::new();
    for case in &crafted.cases {
        let p = problems.get(&case.problem).ok_or(format!("{}: unknown problem", case.id))?;
        let reference = &solutions.get(&case.problem).ok_or(format!("{}: no solution", case.id))?.steps;
        let state = Pss::new(p.clone(), reference[..case.steps_done].to_vec());
        let mut step = case.hint.clone();
        step.index = case.steps_done + 1;
        let verdict = validate_hint(&state, &step);
        ensure(verdict.label() == case.reason, || format!("{}: got {}, planted {}", case.id, verdict.label(), case.reason))?;
        *per_reason.entry(case.reason.clone()).or_default() += 1;
    }
    let want: BTreeMap<String, usize> =
        [("duplicate", 10), ("illogical", 10), ("missing_parents", 10)].map(|(k, v)| (k.to_string(), v)).into();
    ensure(per_reason == want, || format!("case mix {per_reason:?}"))?;
    Ok("30/30 planted verdicts (10 duplicate, 10 missing_parents, 10 illogical)".into())
}

fn oracle_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&w| w < v).count() as f64;
            let equal = x.iter().filter(|&&w| w == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

fn oracle_spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    let (rx, ry) = (oracle_ranks(x), oracle_ranks(y));
    let n = x.len() as f64;
    let (sx, sy) = (rx.iter().sum::<f64>(), ry.iter().sum::<f64>());
    let sxx: f64 = rx.iter().map(|a| a * a).sum();
    let syy: f64 = ry.iter().map(|b| b * b).sum();
    let sxy: f64 = rx.iter().zip(&ry).map(|(a, b)| a * b).sum();
    let (vx, vy) = (n * sxx - sx * sx, n * syy - sy * sy);
    if vx.abs() < 1e-9 || vy.abs() < 1e-9 {
        return None;
    }
    Some((n * sxy - sx * sy) / (vx * vy).sqrt())
}

/// Weighted kappa from pairwise disagreement over all cross pairs.
fn oracle_qwk(x: &[u8], y: &[u8]) -> Option<f64> {
    let w = |a: u8, b: u8| ((a as f64 - b as f64) / 3.0).powi(2);
    let n = x.len() as f64;
    let observed: f64 = x.iter().zip(y).map(|(&a, &b)| w(a, b)).sum::<f64>() / n;
    let expected: f64 = x.iter().flat_map(|&a| y.iter().map(move |&b| w(a, b))).sum::<f64>() / (n * n);
    (expected > 0.0).then(|| 1.0 - observed / expected)
}

fn close(a: Option<f64>, b: Option<f64>) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => (a - b).abs() <= STATS_TOL,
        (None, None) => true,
        _ => false,
    }
}

fn statistics() -> Outcome {
    let mut r = rng(DEFAULT_SEED);
    let mut defined = 0;
    for i in 0..1000 {
        let n = r.random_range(3..=40);
        let x: Vec<u8> = (0..n).map(|_| r.random_range(1..=4)).collect();
        let y: Vec<u8> = x.iter().map(|&v| if r.random_bool(0.5) { v } else { r.random_range(1..=4) }).collect();
        let (xf, yf): (Vec<f64>, Vec<f64>) = (x.iter().map(|&v| v as f64).collect(), y.iter().map(|&v| v as f64).collect());
        let rho = spearman(&xf, &yf).map_err(|e| e.to_string())?.rho;
        ensure(close(rho, oracle_spearman(&xf, &yf)), || format!("pair {i}: spearman {rho:?}"))?;
        let kappa = qwk(&x, &y, 4).map_err(|e| e.to_string())?;
        ensure(close(kappa, oracle_qwk(&x, &y)), || format!("pair {i}: qwk {kappa:?}"))?;
        defined += usize::from(rho.is_some());
    }

    let up = [1.0, 2.0, 2.0, 3.0, 4.0, 4.0];
    let down: Vec<f64> = up.iter().map(|v| 5.0 - v).collect();
    let same = spearman(&up, &up).map_err(|e| e.to_string())?.rho;
    let reversed = spearman(&up, &down).map_err(|e| e.to_string())?.rho;
    let perfect = qwk(&[1, 2, 2, 3, 4, 4], &[1, 2, 2, 3, 4, 4], 4).map_err(|e| e.to_string())?;
    ensure(same == Some(1.0), || format!("self spearman {same:?}"))?;
    ensure(reversed == Some(-1.0), || format!("reversed spearman {reversed:?}"))?;
    ensure(perfect == Some(1.0), || format!("self qwk {perfect:?}"))?;
    let t = welch_t(&[1.0, 2.0, 3.0, 5.0], &[1.0, 2.0, 3.0, 5.0]).map_err(|e| e.to_string())?.t;
    ensure(t == Some(0.0), || format!("welch on identical samples t = {t:?}"))?;
    Ok(format!("1000 pairs within {STATS_TOL:e} ({defined} with defined rho), rho +1/-1, kappa 1, t = 0"))
}

fn eval_run(args: &[&str], out: &Path) -> Result<(String, String), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_logichint"))
        .args(args)
        .args(["--strategy", "FS_CoT", "--json", "--out"])
        .arg(out)
        .current_dir(root())
        .output()
        .map_err(|e| e.to_string())?;
    ensure(status.status.success(), || String::from_utf8_lossy(&status.stderr).into_owned())?;
    let read = |f: &str| std::fs::read_to_string(out.join(f)).map_err(|e| e.to_string());
    Ok((read("report.csv")?, read("summary.json")?))
}

fn pipeline_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let expected = |run: &str| -> Result<Value, String> {
        let text = std::fs::read_to_string(root().join(format!("data/fixtures/{run}/expected.json"))).map_err(|e| e.to_string())?;
        serde_json::from_str(&text).map_err(|e| e.to_string())
    };
    let summary = |text: &str| -> Result<Value, String> { serde_json::from_str(text).map_err(|e| e.to_string()) };

    let prove = ["--cassette", "data/fixtures/run1/cassette.ndjson", "eval"];
    let a = eval_run(&prove, &tmp.path().join("prove-a"))?;
    let b = eval_run(&prove, &tmp.path().join("prove-b"))?;
    ensure(a == b, || "prove reports differ between runs".into())?;
    let s = summary(&a.1)?;
    let want = expected("run1")?;
    let overall = &s["overall"];
    ensure(overall["n"] == 40 && overall["correct"] == 37, || format!("overall {overall}"))?;
    let accuracy = format!("{:.2}", overall["accuracy"].as_f64().unwrap_or(f64::NAN));
    ensure(accuracy == "92.50", || format!("accuracy {accuracy}"))?;
    ensure(s["by_rule"] == want["by_rule"], || format!("per-rule table {}", s["by_rule"]))?;

    let hint = ["--cassette", "data/fixtures/hints1/cassette.ndjson", "eval", "--states", "data/fixtures/hints1/states.json"];
    let c = eval_run(&hint, &tmp.path().join("hint-a"))?;
    let d = eval_run(&hint, &tmp.path().join("hint-b"))?;
    ensure(c == d, || "hint reports differ between runs".into())?;
    let s = summary(&c.1)?;
    let want = expected("hints1")?;
    ensure(s["breakdown"] == want["breakdown"], || format!("hint breakdown {}", s["breakdown"]))?;
    Ok(format!(
        "37/40 = {accuracy}%, per-rule table and hint breakdown match the tally, reports byte-identical across runs"
    ))
}

const HEADINGS: [&str; 5] = ["## Context", "## Instructions", "## Output expectations", "## Examples", "## Your task"];

fn prompt_structure() -> Outcome {
    let forge = Forge::builtin();
    let problem = lt20().get("t3-1").cloned().ok_or("t3-1 missing")?;
    let first = lt20_solutions().get("t3-1").ok_or("t3-1 solution missing")?.steps[..1].to_vec();
    let state = Pss::new(problem.clone(), first);
    let bless = std::env::var_os("LOGICHINT_BLESS").is_some_and(|v| v == "1");
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/prompts");
    let mut checked = 0;
    for task in [Task::Prove, Task::Hint] {
        for strategy in Strategy::ALL {
            let bundle = match task {
                Task::Prove => forge.prove(&problem, strategy),
                _ => forge.hint(&state, strategy),
            }
            .map_err(|e| format!("{task} {strategy}: {e}"))?;
            let name = format!("{task} {strategy}");
            if strategy.is_few_shot() {
                ensure(!bundle.examples.is_empty(), || format!("{name}: no examples"))?;
            } else {
                ensure(bundle.examples.is_empty(), || format!("{name}: zero-shot prompt has examples"))?;
            }
            let text = bundle.text();
            let positions: Vec<usize> = HEADINGS
                .iter()
                .filter(|h| strategy.is_few_shot() || **h != "## Examples")
                .map(|h| text.find(h).ok_or(format!("{name}: missing {h}")))
                .collect::<Result<_, _>>()?;
            ensure(positions.windows(2).all(|w| w[0] < w[1]), || format!("{name}: sections out of order"))?;
            let path = dir.join(format!("{task}_{strategy}.txt"));
            if bless {
                std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
                std::fs::write(&path, &text).map_err(|e| e.to_string())?;
            }
            let golden = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            ensure(golden == text, || format!("{name}: differs from {}", path.display()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked}/12 bundles: example invariants, section order and golden text"))
}

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    check: fn() -> Outcome,
}

const CRITERIA: [Criterion; 8] = [
    Criterion { name: "rule soundness", budget: Some(SOUNDNESS_BUDGET), check: rule_soundness },
    Criterion { name: "parser round trip", budget: Some(ROUND_TRIP_BUDGET), check: parser_round_trip },
    Criterion { name: "search completeness", budget: Some(SEARCH_BUDGET), check: search_completeness },
    Criterion { name: "hint liveness", budget: Some(LIVENESS_BUDGET), check: hint_liveness },
    Criterion { name: "hint criteria", budget: None, check: crafted_hints },
    Criterion { name: "statistics oracles", budget: None, check: statistics },
    Criterion { name: "pipeline determinism", budget: None, check: pipeline_determinism },
    Criterion { name: "prompt structure", budget: None, check: prompt_structure },
];

fn main() {
    // Keep panics from individual checks out of the report.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.budget) {
            (Ok(detail), Some(budget)) if elapsed > budget => {
                Err(format!("{detail}, but took {:.2}s of {}s", elapsed.as_secs_f64(), budget.as_secs()))
            }
            (other, _) => other,
        };
        let budget = c.budget.map_or(String::new(), |b| format!(" of {}s", b.as_secs()));
        match outcome {
            Ok(detail) => println!("PASS {:<22} {detail} [{:.2}s{budget}]", c.name, elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:<22} {why} [{:.2}s{budget}]", c.name, elapsed.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failed, CRITERIA.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

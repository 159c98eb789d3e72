use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use logichint_core::formula;
use logichint_core::kernel::{
    check_proof as verify, from_document, from_document_value, to_document_string, validate_hint,
    Hint, HintVerdict, Problem, ProblemSet, Proof, ProofStep, Pss, SolutionSet,
};
use logichint_core::pss::{annotation, extract_states, InteractionLog, PssRecord, PssSet};
use logichint_core::random;
use logichint_core::search::{next_step_hint, solve as search, SearchResult, SearchStatus};
use logichint_eval::{
    agreement, grade_items, read_ratings, run_pipeline, sample_for_rating, write_agreement,
    write_ratings, Agreement, GradeItems, GroupRow, Input, PipelineConfig, RubricScore,
    SplitConfig, Stage, Summary,
};
use logichint_prompt::{parse_hint, Forge, PromptBundle, Role, Strategy, Task};
use logichint_service::ServeError;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::settings::Settings;

pub struct Out {
    pub json: bool,
}

impl Out {
    fn emit<T: Serialize>(&self, value: &T, text: impl FnOnce() -> String) {
        if self.json {
            println!(
                "{}",
                serde_json::to_string_pretty(value).expect("values serialize")
            );
        } else {
            print!("{}", text());
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::read(path, e))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::write(path, e))
}

fn step_line(step: &ProofStep) -> String {
    format!("S{}: {} {}", step.index, step.formula, annotation(step))
}

fn steps(n: usize) -> String {
    format!("{n} step{}", if n == 1 { "" } else { "s" })
}

fn problem_line(p: &Problem) -> String {
    let premises: Vec<String> = p.premises.iter().map(ToString::to_string).collect();
    format!("{} |- {}", premises.join(", "), p.conclusion)
}

fn find<'a>(problems: &'a ProblemSet, id: &str) -> Result<&'a Problem, CliError> {
    problems
        .get(id)
        .ok_or_else(|| CliError::Parse(format!("unknown problem `{id}`")))
}

/// The state after the first `steps_done` reference steps.
fn reference_state(
    problems: &ProblemSet,
    solutions: &SolutionSet,
    id: &str,
    steps_done: usize,
) -> Result<Pss, CliError> {
    let problem = find(problems, id)?;
    let steps = solutions
        .get(id)
        .map(|s| s.steps.as_slice())
        .unwrap_or_default();
    if steps_done > steps.len() {
        return Err(CliError::Parse(format!(
            "`{id}` has a {}-step reference solution, cannot take {steps_done}",
            steps.len()
        )));
    }
    let mut state = Pss::new(problem.clone(), steps[..steps_done].to_vec());
    state.order = steps_done;
    Ok(state)
}

pub fn parse(out: &Out, text: &str) -> Result<u8, CliError> {
    let f = formula::parse(text).map_err(|e| CliError::parse(format!("`{text}`"), e))?;
    let atoms: Vec<&str> = f.atoms().into_iter().collect();
    let value =
        json!({ "formula": f.to_string(), "length": f.len(), "depth": f.depth(), "atoms": atoms });
    out.emit(&value, || {
        format!(
            "{f}\nlength {}, depth {}, atoms {}\n",
            f.len(),
            f.depth(),
            atoms.join(" ")
        )
    });
    Ok(0)
}

pub fn check_proof(out: &Out, settings: &Settings, file: &Path) -> Result<u8, CliError> {
    let mut value: Value =
        serde_json::from_str(&read(file)?).map_err(|e| CliError::parse(file.display(), e))?;
    // A problem may be given by id.
    if let Some(Value::String(id)) = value.get("problem").cloned() {
        let (problems, _) = settings.problems()?;
        value["problem"] = serde_json::to_value(find(&problems, &id)?).expect("problems serialize");
    }
    let mut proof: Proof =
        from_document_value(value).map_err(|e| CliError::parse(file.display(), e))?;
    for (i, step) in proof.steps.iter_mut().enumerate() {
        step.index = i + 1;
    }
    let report = verify(&proof);
    let value = json!({ "problem": proof.problem.id, "mode": proof.mode, "report": report });
    out.emit(&value, || {
        let mut s = format!("{}: {}\n", proof.problem.id, problem_line(&proof.problem));
        for (step, verdict) in proof.steps.iter().zip(&report.verdicts) {
            match verdict.error() {
                None => writeln!(s, "  {}  ok", step_line(step)),
                Some(e) => writeln!(s, "  {}  INVALID {}: {e}", step_line(step), e.kind()),
            }
            .expect("string write");
        }
        let accuracy = report
            .stepwise_accuracy
            .map_or("n/a".to_string(), |a| format!("{a:.2}"));
        writeln!(
            s,
            "{}/{} steps valid, accuracy {accuracy}, {}",
            report.valid_steps,
            report.total_steps,
            if report.complete {
                "complete"
            } else {
                "incomplete"
            }
        )
        .expect("string write");
        s
    });
    Ok(
        if report.complete && report.valid_steps == report.total_steps {
            0
        } else {
            3
        },
    )
}

pub struct SolveOptions {
    pub ids: Vec<String>,
    pub fuzz: Option<usize>,
    pub steps: usize,
    pub atoms: usize,
    pub indirect: bool,
    pub max_depth: Option<usize>,
    pub max_frontier: Option<usize>,
}

pub fn solve(out: &Out, settings: &Settings, opts: SolveOptions) -> Result<u8, CliError> {
    let mut cfg = settings.search.clone();
    cfg.indirect |= opts.indirect;
    cfg.max_depth = opts.max_depth.unwrap_or(cfg.max_depth);
    cfg.max_frontier = opts.max_frontier.unwrap_or(cfg.max_frontier);
    cfg.validate().map_err(|e| CliError::Parse(e.to_string()))?;

    let problems: Vec<Problem> = match opts.fuzz {
        Some(n) => {
            if opts.atoms == 0 {
                return Err(CliError::Parse("--atoms must be positive".into()));
            }
            let mut rng = random::rng(settings.seed);
            let atoms = random::atom_names(opts.atoms);
            (1..=n)
                .map(|i| random::problem(&mut rng, &format!("fuzz-{i}"), opts.steps, &atoms))
                .collect()
        }
        None => {
            let (set, _) = settings.problems()?;
            if opts.ids.is_empty() {
                set.problems
            } else {
                opts.ids
                    .iter()
                    .map(|id| find(&set, id).cloned())
                    .collect::<Result<_, _>>()?
            }
        }
    };

    let results: Vec<SearchResult> = problems.iter().map(|p| search(p, &cfg)).collect();
    // Search results are re-checked by the kernel rather than trusted.
    let mut unsound = Vec::new();
    for r in &results {
        if let Some(proof) = &r.proof {
            if !verify(proof).complete {
                unsound.push(proof.problem.id.clone());
            }
        }
    }
    let solved = results
        .iter()
        .filter(|r| r.status == SearchStatus::Found)
        .count();
    let value = json!({
        "seed": opts.fuzz.map(|_| settings.seed),
        "solved": solved,
        "total": results.len(),
        "results": results,
    });
    out.emit(&value, || {
        let mut s = String::new();
        for (p, r) in problems.iter().zip(&results) {
            writeln!(s, "{}: {}", p.id, problem_line(p)).expect("string write");
            let status = match (&r.status, &r.proof) {
                (SearchStatus::Found, Some(proof)) => {
                    format!("found, {}", steps(proof.steps.len()))
                }
                (status, _) => format!("{status:?}").to_lowercase(),
            };
            writeln!(
                s,
                "  {status} (explored {}, depth {})",
                r.explored, r.depth_reached
            )
            .expect("string write");
            if let Some(a) = r.proof.as_ref().and_then(Proof::assumption) {
                writeln!(s, "  S0: {a} [assumption]").expect("string write");
            }
            for step in r.proof.iter().flat_map(|p| &p.steps) {
                writeln!(s, "  {}", step_line(step)).expect("string write");
            }
        }
        match opts.fuzz {
            Some(_) => writeln!(
                s,
                "solved {solved}/{} (seed {})",
                results.len(),
                settings.seed
            ),
            None => writeln!(s, "solved {solved}/{}", results.len()),
        }
        .expect("string write");
        s
    });
    if !unsound.is_empty() {
        return Err(CliError::Verification(format!(
            "search returned unsound proofs for {}",
            unsound.join(", ")
        )));
    }
    Ok(if solved == results.len() { 0 } else { 3 })
}

pub struct HintOptions {
    pub state: Option<PathBuf>,
    pub problem: Option<String>,
    pub steps_done: usize,
    pub llm: bool,
    pub strategy: Strategy,
}

#[derive(Serialize)]
struct HintOutcome {
    problem: String,
    order: usize,
    source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    hint: Option<Hint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<HintVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn read_states(path: &Path) -> Result<Vec<Pss>, CliError> {
    let text = read(path)?;
    if let Ok(set) = from_document::<PssSet>(&text) {
        return Ok(set.states.into_iter().map(|r| r.state).collect());
    }
    let state = from_document::<Pss>(&text).map_err(|e| CliError::parse(path.display(), e))?;
    Ok(vec![state])
}

pub fn hint(out: &Out, settings: &Settings, opts: HintOptions) -> Result<u8, CliError> {
    let states = match (&opts.state, &opts.problem) {
        (Some(path), _) => read_states(path)?,
        (None, Some(id)) => {
            let (problems, solutions) = settings.problems()?;
            vec![reference_state(&problems, &solutions, id, opts.steps_done)?]
        }
        (None, None) => unreachable!("clap requires a state or a problem"),
    };
    let gateway = if opts.llm {
        Some(settings.gateway()?)
    } else {
        None
    };
    let forge = Forge::builtin();

    let mut outcomes = Vec::with_capacity(states.len());
    for state in &states {
        let mut outcome = HintOutcome {
            problem: state.problem.id.clone(),
            order: state.order,
            source: if opts.llm { "llm" } else { "search" },
            hint: None,
            verdict: None,
            error: None,
        };
        match &gateway {
            None => outcome.hint = next_step_hint(state, &settings.search),
            Some(gateway) => {
                let bundle = forge
                    .hint(state, opts.strategy)
                    .map_err(|e| CliError::Parse(e.to_string()))?;
                let completion = gateway.complete(&bundle);
                let text = completion
                    .result()
                    .map_err(|e| CliError::Backend(e.to_string()))?;
                let parsed = parse_hint(text);
                outcome.error = parsed.error;
                outcome.hint = parsed.hint.map(|mut h| {
                    h.step.index = state.derived.len() + 1;
                    h
                });
            }
        }
        outcome.verdict = outcome.hint.as_ref().map(|h| validate_hint(state, &h.step));
        outcomes.push(outcome);
    }

    out.emit(&outcomes, || {
        let mut s = String::new();
        for o in &outcomes {
            writeln!(s, "{} after {}", o.problem, steps(o.order)).expect("string write");
            match (&o.hint, &o.error) {
                (Some(h), _) => {
                    writeln!(s, "  hint: {}", step_line(&h.step)).expect("string write");
                    if let Some(v) = &o.verdict {
                        match v {
                            HintVerdict::Correct => writeln!(s, "  verdict: correct"),
                            HintVerdict::Incorrect(e) => {
                                writeln!(s, "  verdict: {} ({e})", v.label())
                            }
                        }
                        .expect("string write");
                    }
                    if let Some(e) = &h.explanation {
                        writeln!(s, "  explanation: {e}").expect("string write");
                    }
                }
                (None, Some(e)) => {
                    writeln!(s, "  unparseable response: {e}").expect("string write")
                }
                (None, None) => writeln!(s, "  no hint available").expect("string write"),
            }
        }
        s
    });
    let failed = outcomes
        .iter()
        .any(|o| o.error.is_some() || o.verdict.as_ref().is_some_and(|v| !v.is_correct()));
    Ok(if failed { 3 } else { 0 })
}

pub fn extract_pss(
    out: &Out,
    settings: &Settings,
    logs: &[PathBuf],
    dest: Option<&Path>,
) -> Result<u8, CliError> {
    let (problems, _) = settings.problems()?;
    let mut states = Vec::new();
    for path in logs {
        let log = InteractionLog::from_ndjson(&read(path)?)
            .map_err(|e| CliError::parse(path.display(), e))?;
        let problem = find(&problems, &log.problem)?;
        let found =
            extract_states(&log, problem).map_err(|e| CliError::parse(path.display(), e))?;
        states.extend(found.into_iter().map(PssRecord::new));
    }
    let set = PssSet { states };
    let document = to_document_string(&set);
    match dest {
        None => print!("{document}"),
        Some(path) => {
            write(path, &document)?;
            let value = json!({ "logs": logs.len(), "states": set.states.len() });
            out.emit(&value, || {
                format!(
                    "{} states from {} log{}\n",
                    set.states.len(),
                    logs.len(),
                    if logs.len() == 1 { "" } else { "s" }
                )
            });
        }
    }
    Ok(0)
}

pub struct PromptOptions {
    pub task: Task,
    pub strategy: Strategy,
    pub problem: Option<String>,
    pub steps_done: usize,
    pub state: Option<PathBuf>,
    pub explanation: Option<String>,
}

#[derive(Serialize)]
struct PromptView<'a> {
    #[serde(flatten)]
    bundle: &'a PromptBundle,
    text: String,
}

pub fn prompt(out: &Out, settings: &Settings, opts: PromptOptions) -> Result<u8, CliError> {
    let forge = Forge::builtin();
    let (problems, solutions) = settings.problems()?;
    let state = || -> Result<Pss, CliError> {
        match (&opts.state, &opts.problem) {
            (Some(path), _) => {
                from_document::<Pss>(&read(path)?).map_err(|e| CliError::parse(path.display(), e))
            }
            (None, Some(id)) => reference_state(&problems, &solutions, id, opts.steps_done),
            (None, None) => unreachable!("clap requires a state or a problem"),
        }
    };
    let bundle = match opts.task {
        Task::Prove => {
            let id = opts
                .problem
                .as_deref()
                .ok_or_else(|| CliError::Parse("prove prompts need --problem".into()))?;
            forge.prove(find(&problems, id)?, opts.strategy)
        }
        Task::Hint => forge.hint(&state()?, opts.strategy),
        Task::Grade => {
            let explanation = opts
                .explanation
                .as_deref()
                .ok_or_else(|| CliError::Parse("grade prompts need --explanation".into()))?;
            forge.grade(explanation, &state()?)
        }
    }
    .map_err(|e| CliError::Parse(e.to_string()))?;
    let view = PromptView {
        bundle: &bundle,
        text: bundle.text(),
    };
    out.emit(&view, || view.text.clone());
    Ok(0)
}

pub struct EvalOptions {
    pub states: Option<PathBuf>,
    pub strategies: Vec<Strategy>,
    pub split: Option<PathBuf>,
    pub role: Role,
    pub out: Option<PathBuf>,
    pub ratings: Vec<PathBuf>,
}

fn load_ratings(path: &Path) -> Result<Vec<RubricScore>, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::read(path, e))?;
    read_ratings(file).map_err(|e| CliError::parse(path.display(), e))
}

fn compare_ratings(a: &Path, b: &Path) -> Result<Agreement, CliError> {
    agreement(&load_ratings(a)?, &load_ratings(b)?)
        .map_err(|e| CliError::Verification(e.to_string()))
}

fn opt(v: Option<f64>, digits: usize) -> String {
    v.map_or("n/a".into(), |x| format!("{x:.digits$}"))
}

fn agreement_text(a: &Agreement) -> String {
    let mut s = format!(
        "{:<14}{:>4}{:>8}{:>8}{:>8}{:>11}{:>8}  significant\n",
        "dimension", "n", "mean_a", "mean_b", "rho", "p", "qwk"
    );
    for d in &a.dimensions {
        let p = d.p_value.map_or("n/a".into(), |p| format!("{p:.2e}"));
        let sig = match d.significant {
            Some(true) => "yes",
            Some(false) => "no",
            None => "n/a",
        };
        writeln!(
            s,
            "{:<14}{:>4}{:>8.2}{:>8.2}{:>8}{:>11}{:>8}  {sig}",
            d.dimension.as_str(),
            d.n,
            d.mean_a,
            d.mean_b,
            opt(d.spearman_rho, 3),
            p,
            opt(d.qwk, 3)
        )
        .expect("string write");
    }
    writeln!(
        s,
        "{} shared items, {} unmatched, significance threshold {}",
        a.n, a.unmatched, a.threshold
    )
    .expect("string write");
    s
}

fn group_table(s: &mut String, title: &str, rows: &[GroupRow]) {
    if rows.is_empty() {
        return;
    }
    writeln!(
        s,
        "\n{title:<18}{:>6}{:>9}{:>10}",
        "n", "correct", "accuracy"
    )
    .expect("string write");
    for r in rows {
        writeln!(
            s,
            "{:<18}{:>6}{:>9}{:>10.2}",
            r.key, r.n, r.correct, r.accuracy
        )
        .expect("string write");
    }
}

fn summary_text(summary: &Summary, agreement: Option<&Agreement>) -> String {
    let mut s = format!(
        "{} task, model {} via {}, {} split, strategies {}\n",
        summary.task,
        summary.model,
        summary.backend,
        summary.role,
        summary
            .strategies
            .iter()
            .map(|st| st.as_str())
            .collect::<Vec<_>>()
            .join(",")
    );
    let o = &summary.overall;
    writeln!(
        s,
        "{} items, {} records, {} correct ({:.2}%)",
        summary.items, o.n, o.correct, o.accuracy
    )
    .expect("string write");
    group_table(&mut s, "strategy", &summary.by_strategy);
    group_table(&mut s, "backend", &summary.by_backend);
    group_table(&mut s, "rule", &summary.by_rule);
    group_table(&mut s, "level", &summary.by_level);
    if summary.task == Task::Hint && !summary.breakdown.is_empty() {
        writeln!(
            s,
            "\n{:<8}{:>9}{:>11}  reasons",
            "rule", "correct", "incorrect"
        )
        .expect("string write");
        for r in &summary.breakdown {
            let reasons: Vec<String> = r.reasons.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let line = format!(
                "{:<8}{:>9}{:>11}  {}",
                r.rule,
                r.correct,
                r.incorrect,
                reasons.join(" ")
            );
            writeln!(s, "{}", line.trim_end()).expect("string write");
        }
    }
    s.push('\n');
    if let Some(u) = &summary.unique_hints {
        writeln!(s, "unique hints per problem: mean {:.2}", u.mean).expect("string write");
    }
    if !summary.proofs.is_empty() {
        let complete = summary.proofs.iter().filter(|p| p.complete).count();
        writeln!(s, "complete proofs: {complete}/{}", summary.proofs.len()).expect("string write");
    }
    let pl = &summary.parent_length;
    write!(
        s,
        "parent length: incorrect mean {}, correct mean {}",
        opt(pl.incorrect_mean, 2),
        opt(pl.correct_mean, 2)
    )
    .expect("string write");
    match &pl.welch {
        Some(w) => writeln!(s, ", Welch t {}, p {}", opt(w.t, 3), opt(w.p_value, 4)),
        None => writeln!(s),
    }
    .expect("string write");
    if !summary.failures.is_empty() {
        writeln!(s, "\nfailures").expect("string write");
        for f in &summary.failures {
            let stage = serde_json::to_value(&f.stage).expect("stages serialize");
            writeln!(
                s,
                "  {} {} {}: {}",
                f.item,
                f.strategy,
                stage.as_str().unwrap_or("?"),
                f.message
            )
            .expect("string write");
        }
    }
    if let Some(a) = agreement {
        s.push('\n');
        s.push_str(&agreement_text(a));
    }
    s
}

pub fn eval(out: &Out, settings: &Settings, opts: EvalOptions) -> Result<u8, CliError> {
    let (problems, _) = settings.problems()?;
    let split = match &opts.split {
        Some(path) => {
            SplitConfig::from_toml(&read(path)?).map_err(|e| CliError::parse(path.display(), e))?
        }
        None => SplitConfig::builtin(),
    };
    let input = match &opts.states {
        Some(path) => Input::States(
            from_document::<PssSet>(&read(path)?)
                .map_err(|e| CliError::parse(path.display(), e))?,
        ),
        None => Input::Problems(problems),
    };
    let strategies = if opts.strategies.is_empty() {
        Strategy::ALL.to_vec()
    } else {
        opts.strategies
    };
    let gateway = settings.gateway()?;
    let cfg = PipelineConfig {
        strategies,
        role: opts.role,
    };
    let mut report = run_pipeline(&input, &cfg, &Forge::builtin(), &gateway, &split);
    if let [a, b] = opts.ratings.as_slice() {
        report.agreement = Some(compare_ratings(a, b)?);
    }
    if let Some(dir) = &opts.out {
        fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
        report.write_to(dir).map_err(|e| CliError::write(dir, e))?;
    }
    let value = json!({ "summary": report.summary, "agreement": report.agreement });
    out.emit(&value, || {
        summary_text(&report.summary, report.agreement.as_ref())
    });

    let s = &report.summary;
    let completion_failures: Vec<_> = s
        .failures
        .iter()
        .filter(|f| f.stage == Stage::Completion)
        .collect();
    if s.rows == 0
        && !completion_failures.is_empty()
        && completion_failures.len() == s.failures.len()
    {
        return Err(CliError::Backend(format!(
            "every completion failed, first: {}",
            completion_failures[0].message
        )));
    }
    Ok(0)
}

pub struct GradeOptions {
    pub items: PathBuf,
    pub fraction: f64,
    pub rater: Option<String>,
    pub sample_only: bool,
    pub out: Option<PathBuf>,
}

pub fn grade(out: &Out, settings: &Settings, opts: GradeOptions) -> Result<u8, CliError> {
    if !(opts.fraction > 0.0 && opts.fraction <= 1.0) {
        return Err(CliError::Parse(format!(
            "--fraction {} is outside (0, 1]",
            opts.fraction
        )));
    }
    let path = &opts.items;
    let all: GradeItems =
        from_document(&read(path)?).map_err(|e| CliError::parse(path.display(), e))?;
    let ids: Vec<String> = all.items.iter().map(|i| i.id.clone()).collect();
    let sampled = sample_for_rating(&ids, opts.fraction, settings.seed);
    if opts.sample_only {
        let value = json!({ "seed": settings.seed, "fraction": opts.fraction, "of": ids.len(), "items": sampled });
        out.emit(&value, || {
            sampled.iter().map(|id| format!("{id}\n")).collect()
        });
        return Ok(0);
    }
    let chosen: Vec<_> = all
        .items
        .into_iter()
        .filter(|i| sampled.contains(&i.id))
        .collect();
    let gateway = settings.gateway()?;
    let rater = opts.rater.unwrap_or_else(|| gateway.config().model.clone());
    let outcome = grade_items(&chosen, &Forge::builtin(), &gateway, &rater);

    let mut csv = Vec::new();
    write_ratings(&mut csv, &outcome.scores).map_err(|e| CliError::Io(e.to_string()))?;
    let csv = String::from_utf8(csv).expect("csv output is UTF-8");
    for f in &outcome.failures {
        eprintln!("warning: {}: {}", f.item, f.message);
    }
    let value = json!({
        "seed": settings.seed,
        "fraction": opts.fraction,
        "of": ids.len(),
        "sampled": sampled,
        "rater": rater,
        "scores": outcome.scores,
        "degenerate": outcome.degenerate,
        "failures": outcome.failures,
    });
    match &opts.out {
        Some(dest) => {
            write(dest, &csv)?;
            out.emit(&value, || {
                format!(
                    "rated {} of {} sampled items ({} in total, seed {}), {} failed\n",
                    outcome.scores.len(),
                    sampled.len(),
                    ids.len(),
                    settings.seed,
                    outcome.failures.len()
                )
            });
        }
        None => out.emit(&value, || csv.clone()),
    }
    if outcome.scores.is_empty()
        && outcome
            .failures
            .iter()
            .any(|f| f.stage == Stage::Completion)
    {
        return Err(CliError::Backend("every grading request failed".into()));
    }
    Ok(0)
}

pub fn stats(out: &Out, a: &Path, b: &Path, dir: Option<&Path>) -> Result<u8, CliError> {
    let agreement = compare_ratings(a, b)?;
    if let Some(dir) = dir {
        fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
        write_agreement(dir, &agreement).map_err(|e| CliError::write(dir, e))?;
    }
    out.emit(&agreement, || agreement_text(&agreement));
    Ok(0)
}

pub fn serve(
    out: &Out,
    settings: Settings,
    bind: Option<String>,
    sessions: Option<PathBuf>,
    dry_run: bool,
) -> Result<u8, CliError> {
    let mut cfg = settings.service;
    if let Some(bind) = bind {
        cfg.bind = bind;
    }
    if let Some(dir) = sessions {
        cfg.data_dir = dir;
    }
    if cfg.problems_dir.is_none() {
        cfg.problems_dir = settings.data_dir.map(|d| d.join("problems"));
    }
    if cfg.backend.is_none() {
        cfg.backend = settings.backend;
    }
    let map_err = |e: ServeError| match e {
        ServeError::Backend(e) => CliError::Backend(e.to_string()),
        ServeError::Store(logichint_service::StoreError::Invalid { .. }) => {
            CliError::Parse(e.to_string())
        }
        other => CliError::Io(other.to_string()),
    };
    if dry_run {
        let _router = logichint_service::build(&cfg).map_err(map_err)?;
        let problems = cfg.problems_dir.as_ref().map(|p| p.display().to_string());
        let backend = cfg
            .backend
            .as_ref()
            .map(|b| format!("{} ({})", b.id, b.model));
        let value = json!({
            "bind": cfg.bind,
            "sessions": cfg.data_dir.join("sessions"),
            "problems": problems,
            "backend": backend,
            "hint_strategy": cfg.hint_strategy,
        });
        out.emit(&value, || {
            format!(
                "bind {}\nsessions {}\nproblems {}\nbackend {}\nhint strategy {}\n",
                cfg.bind,
                cfg.data_dir.join("sessions").display(),
                problems.as_deref().unwrap_or("bundled"),
                backend.as_deref().unwrap_or("none"),
                cfg.hint_strategy
            )
        });
        return Ok(0);
    }
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Io(e.to_string()))?;
    runtime
        .block_on(logichint_service::serve(&cfg))
        .map_err(map_err)?;
    Ok(0)
}

use std::path::Path;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use logichint_core::formula::parse;
use logichint_core::kernel::{Level, Problem, ProblemSet, ProofStep, Pss, StepRef, to_document_string};
use logichint_core::rules::RuleId;
use logichint_core::search::SearchConfig;
use logichint_gateway::{BackendConfig, Cassette, Entry, Gateway, Replay};
use logichint_prompt::{Forge, Strategy};
use logichint_service::{router, AppState, ProblemStore, ServiceConfig, SessionStore};
use serde_json::{json, Value};
use tower::ServiceExt;

fn problem(id: &str, premises: &[&str], conclusion: &str, level: Level) -> Problem {
    Problem::new(id, premises.iter().map(|p| parse(p).unwrap()).collect(), parse(conclusion).unwrap(), level).unwrap()
}

fn problems_dir(root: &Path) -> std::path::PathBuf {
    let dir = root.join("problems");
    std::fs::create_dir_all(&dir).unwrap();
    let set = ProblemSet {
        problems: vec![
            problem("demo", &["A -> B", "A"], "B", Level::Train1),
            problem("chain", &["A -> B", "B -> C", "A"], "C", Level::Train2),
        ],
    };
    std::fs::write(dir.join("a.json"), to_document_string(&set)).unwrap();
    std::fs::write(dir.join("b.json"), to_document_string(&problem("exam", &["P & Q"], "Q & P", Level::Posttest))).unwrap();
    dir
}

fn app(root: &Path, gateway: Option<Gateway>) -> Router {
    let problems = ProblemStore::from_dir(&problems_dir(root)).unwrap();
    let store = SessionStore::open(&root.join("data")).unwrap();
    let (state, skipped) = AppState::new(problems, store, gateway, Strategy::FS_CoT, SearchConfig::default()).unwrap();
    assert!(skipped.is_empty());
    router(state, &[])
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn session(app: &Router, problem: &str) -> String {
    let (status, body) = call(app, "POST", "/sessions", Some(json!({ "problem_id": problem }))).await;
    assert_eq!(status, StatusCode::CREATED);
    body["id"].as_str().unwrap().to_owned()
}

async fn step(app: &Router, id: &str, formula: &str, rule: &str, parents: &[&str]) -> (StatusCode, Value) {
    let body = json!({ "formula": formula, "rule": rule, "parents": parents });
    call(app, "POST", &format!("/sessions/{id}/steps"), Some(body)).await
}

#[tokio::test]
async fn lists_problems_with_gating() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path(), None);
    let (status, body) = call(&app, "GET", "/problems", None).await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<&str> = body["problems"].as_array().unwrap().iter().map(|p| p["id"].as_str().unwrap()).collect();
    assert_eq!(ids, vec!["demo", "chain", "exam"]);
    assert_eq!(body["problems"][2]["hints_allowed"], false);
    assert_eq!(body["problems"][0]["premises"], json!(["A -> B", "A"]));
}

#[tokio::test]
async fn sessions_are_created_and_fetched() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path(), None);
    let a = session(&app, "demo").await;
    let b = session(&app, "demo").await;
    assert_ne!(a, b);
    let (status, body) = call(&app, "GET", &format!("/sessions/{a}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["derived"], json!([]));
    assert_eq!(body["hint_count"], 0);

    let (status, body) = call(&app, "POST", "/sessions", Some(json!({ "problem_id": "nope" }))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["error"]["code"], "not_found");
    assert_eq!(call(&app, "GET", "/sessions/missing", None).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn steps_are_checked_before_they_are_kept() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path(), None);
    let id = session(&app, "chain").await;

    let (status, body) = step(&app, &id, "C", "MP", &["P2", "S1"]).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["accepted"], false);
    assert_eq!(body["verdict"]["reason"], "parent_not_derived");
    assert_eq!(body["verdict"]["message"], "parent not derived: S1");
    assert_eq!(body["session"]["derived"], json!([]));

    let (_, body) = step(&app, &id, "B", "MP", &["P1", "P3"]).await;
    assert_eq!(body["accepted"], true);
    assert_eq!(body["complete"], false);
    assert_eq!(body["session"]["derived"].as_array().unwrap().len(), 1);

    let (_, body) = step(&app, &id, "C", "Modus Ponens", &["P2", "S1"]).await;
    assert_eq!(body["complete"], true);
    assert_eq!(body["session"]["solved"], true);
    assert_eq!(body["session"]["rendered"], "Givens:\nP1: A -> B\nP2: B -> C\nP3: A\nDerived:\nS1: B [MP from P1, P3]\nS2: C [MP from P2, S1]\nGoal: C\n");

    for bad in [
        json!({ "formula": "A ->", "rule": "MP", "parents": ["P1"] }),
        json!({ "formula": "A", "rule": "XX", "parents": ["P1"] }),
        json!({ "formula": "A", "rule": "MP", "parents": ["Q1"] }),
        json!({ "rule": "MP" }),
    ] {
        let (status, body) = call(&app, "POST", &format!("/sessions/{id}/steps"), Some(bad)).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{body}");
    }
}

#[tokio::test]
async fn search_hints() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path(), None);
    let id = session(&app, "demo").await;
    let (status, body) = call(&app, "GET", &format!("/sessions/{id}/hint?source=search"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["available"], true);
    assert_eq!(body["hint"]["step"], json!({ "index": 1, "formula": "B", "rule": "MP", "parents": ["P1", "P2"] }));
    assert_eq!(body["verdict"]["correct"], true);
    assert_eq!(body["hint_count"], 1);

    step(&app, &id, "B", "MP", &["P1", "P2"]).await;
    let (status, body) = call(&app, "GET", &format!("/sessions/{id}/hint"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["available"], false);
    assert_eq!(body["message"], "no hint available");
    assert_eq!(body["hint_count"], 2);

    let (status, _) = call(&app, "GET", &format!("/sessions/{id}/hint?source=oracle"), None).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn posttest_hints_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path(), None);
    let id = session(&app, "exam").await;
    let (status, body) = call(&app, "GET", &format!("/sessions/{id}/hint"), None).await;
    assert_eq!(status, StatusCode::FORBIDDEN);
    assert_eq!(body["error"]["code"], "hints_disabled");
    let (_, body) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(body["hint_count"], 0);
}

#[tokio::test]
async fn llm_hint_needs_a_backend() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path(), None);
    let id = session(&app, "demo").await;
    let (status, body) = call(&app, "GET", &format!("/sessions/{id}/hint?source=llm"), None).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert_eq!(body["error"]["code"], "backend_unavailable");
}

#[tokio::test]
async fn llm_hint_repeating_a_step_is_a_duplicate() {
    let dir = tempfile::tempdir().unwrap();
    let chain = problem("chain", &["A -> B", "B -> C", "A"], "C", Level::Train2);
    let done = ProofStep::new(1, parse("B").unwrap(), RuleId::MP, vec![StepRef::Premise(1), StepRef::Premise(3)]);
    let state = Pss::new(chain, vec![done]);

    let cfg = BackendConfig::preset("replay").unwrap();
    let probe = Gateway::new(cfg.clone(), Replay::new(Cassette::default())).unwrap();
    let request = probe.request(&Forge::builtin().hint(&state, Strategy::FS_CoT).unwrap());
    let mut cassette = Cassette::default();
    let text = "Answer:\n```json\n{\"step\":{\"formula\":\"B\",\"rule\":\"MP\",\"parents\":[\"P1\",\"P3\"]},\"explanation\":\"Use MP.\"}\n```";
    cassette.insert(Entry::new(&request, text));
    let app = app(dir.path(), Some(Gateway::new(cfg, Replay::new(cassette)).unwrap()));

    let id = session(&app, "chain").await;
    step(&app, &id, "B", "MP", &["P1", "P3"]).await;
    let (status, body) = call(&app, "GET", &format!("/sessions/{id}/hint?source=llm"), None).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["source"], "llm");
    assert_eq!(body["hint"]["explanation"], "Use MP.");
    assert_eq!(body["verdict"]["correct"], false);
    assert_eq!(body["verdict"]["reason"], "duplicate");

    // A state the cassette does not cover reads as an unavailable backend.
    let other = session(&app, "demo").await;
    let (status, _) = call(&app, "GET", &format!("/sessions/{other}/hint?source=llm"), None).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
}

#[tokio::test]
async fn sessions_survive_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let first = app(dir.path(), None);
    let id = session(&first, "chain").await;
    step(&first, &id, "B", "MP", &["P1", "P3"]).await;
    step(&first, &id, "C", "MP", &["P1", "S1"]).await; // rejected, not persisted
    call(&first, "GET", &format!("/sessions/{id}/hint"), None).await;
    let (_, before) = call(&first, "GET", &format!("/sessions/{id}"), None).await;

    let second = app(dir.path(), None);
    let (status, after) = call(&second, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(before, after);
    assert_eq!(after["events"].as_array().unwrap().len(), 2);
}

#[test]
fn config_from_toml() {
    let cfg = ServiceConfig::from_toml(
        r#"
        bind = "0.0.0.0:9000"
        data_dir = "/tmp/x"
        cors_origins = ["http://localhost:5173"]
        hint_strategy = "FS_ToT_CoT"

        [backend]
        id = "replay"
        kind = "replay"
        model = "deepseek-v3"
        cassette = "c.ndjson"

        [search]
        max_depth = 9
        "#,
    )
    .unwrap();
    assert_eq!(cfg.bind, "0.0.0.0:9000");
    assert_eq!(cfg.hint_strategy, Strategy::FS_ToT_CoT);
    assert_eq!(cfg.search.max_depth, 9);
    assert_eq!(cfg.search.max_frontier, SearchConfig::default().max_frontier);
    assert_eq!(cfg.backend.unwrap().temperature, 0.1);
    assert!(ServiceConfig::from_toml("port = 1").is_err());
    assert_eq!(ServiceConfig::from_toml("").unwrap(), ServiceConfig::default());
}

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use logichint_core::data::lt20;
use logichint_gateway::{
    BackendConfig, BackendKind, Cassette, CompletionError, Gateway, Recorder, Replay,
};
use logichint_prompt::{Forge, PromptBundle, Strategy};

struct Captured {
    head: String,
    body: serde_json::Value,
}

/// Serves `responses` (status, body) in order, one connection each.
fn serve(responses: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<Captured>>>, JoinHandle<()>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    let handle = std::thread::spawn(move || {
        for (status, body) in responses {
            let (stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut head = String::new();
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                head.push_str(&line);
            }
            let len: usize = head
                .lines()
                .find_map(|l| l.to_ascii_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse().unwrap()))
                .unwrap_or(0);
            let mut buf = vec![0; len];
            reader.read_exact(&mut buf).unwrap();
            log.lock().unwrap().push(Captured { head, body: serde_json::from_slice(&buf).unwrap() });
            let reply = format!(
                "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                body.len()
            );
            (&stream).write_all(reply.as_bytes()).unwrap();
        }
    });
    (url, seen, handle)
}

fn bundle() -> PromptBundle {
    Forge::builtin().prove(lt20().get("t1-1").unwrap(), Strategy::ZS).unwrap()
}

fn openai(url: &str) -> BackendConfig {
    let mut cfg = BackendConfig::new("mock", BackendKind::OpenaiCompatible, &format!("{url}/v1/chat/completions"), "m-1");
    cfg.credential_var = Some("LOGICHINT_TEST_MOCK_KEY".into());
    cfg.retry.backoff_ms = 1;
    cfg.timeout_secs = 5.0;
    cfg
}

const OK: &str = r#"{"choices":[{"message":{"role":"assistant","content":"hello"}}],"usage":{"prompt_tokens":12,"completion_tokens":3}}"#;

#[test]
fn openai_request_shape_and_retry() {
    let (url, seen, server) = serve(vec![(429, "{}".into()), (503, "busy".into()), (200, OK.into())]);
    std::env::set_var("LOGICHINT_TEST_MOCK_KEY", "sk-test");
    let gw = Gateway::from_config(openai(&url)).unwrap();
    let c = gw.complete(&bundle());
    server.join().unwrap();
    assert_eq!(c.text(), Some("hello"));
    assert_eq!(c.attempts, 3);
    assert_eq!(c.usage.unwrap().prompt_tokens, 12);
    let seen = seen.lock().unwrap();
    let first = &seen[0];
    assert!(first.head.starts_with("POST /v1/chat/completions HTTP/1.1"));
    assert!(first.head.to_ascii_lowercase().contains("authorization: bearer sk-test"));
    assert_eq!(first.body["temperature"], 0.1);
    assert_eq!(first.body["model"], "m-1");
    assert_eq!(first.body["messages"][0]["content"], bundle().text());
}

#[test]
fn auth_failure_is_not_retried() {
    let (url, seen, server) = serve(vec![(401, "{}".into())]);
    let mut cfg = openai(&url);
    cfg.credential_var = Some("LOGICHINT_TEST_AUTH_KEY".into());
    std::env::set_var("LOGICHINT_TEST_AUTH_KEY", "bad");
    let c = Gateway::from_config(cfg).unwrap().complete(&bundle());
    server.join().unwrap();
    assert_eq!(c.error(), Some(&CompletionError::Auth { status: 401 }));
    assert_eq!((c.attempts, seen.lock().unwrap().len()), (1, 1));
}

#[test]
fn malformed_body_is_reported() {
    let (url, _, server) = serve(vec![(200, r#"{"choices":[]}"#.into())]);
    let mut cfg = openai(&url);
    cfg.credential_var = Some("LOGICHINT_TEST_MALFORMED_KEY".into());
    std::env::set_var("LOGICHINT_TEST_MALFORMED_KEY", "k");
    let c = Gateway::from_config(cfg).unwrap().complete(&bundle());
    server.join().unwrap();
    assert!(matches!(c.error(), Some(CompletionError::Malformed { .. })), "{c:?}");
}

#[test]
fn gemini_request_shape() {
    let reply = r#"{"candidates":[{"content":{"parts":[{"text":"a"},{"text":"b"}]}}],"usageMetadata":{"promptTokenCount":5,"candidatesTokenCount":2}}"#;
    let (url, seen, server) = serve(vec![(200, reply.into())]);
    let mut cfg = BackendConfig::new("gem", BackendKind::Gemini, &format!("{url}/v1beta/"), "gemini-x");
    cfg.credential_var = Some("LOGICHINT_TEST_GEMINI_KEY".into());
    std::env::set_var("LOGICHINT_TEST_GEMINI_KEY", "g-key");
    let c = Gateway::from_config(cfg).unwrap().complete(&bundle());
    server.join().unwrap();
    assert_eq!(c.text(), Some("ab"));
    let seen = seen.lock().unwrap();
    assert!(seen[0].head.starts_with("POST /v1beta/models/gemini-x:generateContent HTTP/1.1"));
    assert!(seen[0].head.to_ascii_lowercase().contains("x-goog-api-key: g-key"));
    assert_eq!(seen[0].body["generationConfig"]["temperature"], 0.1);
}

#[test]
fn missing_credential_is_an_error() {
    let mut cfg = BackendConfig::preset("gpt-4o").unwrap();
    cfg.credential_var = Some("LOGICHINT_TEST_UNSET_KEY".into());
    let err = Gateway::from_config(cfg).err().unwrap();
    assert_eq!(err.to_string(), "environment variable LOGICHINT_TEST_UNSET_KEY is not set");
}

#[test]
fn record_then_replay() {
    let (url, _, server) = serve(vec![(200, OK.into())]);
    let cfg = openai(&url);
    let recorder = Arc::new(Recorder::new(logichint_gateway::OpenAiCompatible::new(&cfg, "k".into())));
    let gw = Gateway::new(cfg.clone(), recorder.clone()).unwrap();
    let live = gw.complete(&bundle());
    server.join().unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.ndjson");
    recorder.cassette().save(&path).unwrap();
    assert_eq!(Cassette::load(&path).unwrap().len(), 1);

    let mut replay_cfg = BackendConfig::replay("m-1", &path);
    replay_cfg.temperature = cfg.temperature;
    let replay = Gateway::from_config(replay_cfg).unwrap();
    let again = replay.complete(&bundle());
    assert_eq!(again.text(), live.text());
    assert_eq!(again.request_hash, live.request_hash);
    assert_eq!(again.latency_ms, 0);

    let other = Forge::builtin().prove(lt20().get("t1-2").unwrap(), Strategy::ZS).unwrap();
    let miss = replay.complete(&other);
    assert_eq!(miss.error(), Some(&CompletionError::Miss { hash: miss.request_hash.clone() }));
}

#[test]
fn empty_cassette_misses_everything() {
    let gw = Gateway::new(BackendConfig::preset("replay").unwrap(), Replay::new(Cassette::default())).unwrap();
    let all = gw.complete_all(&[bundle(), bundle()]);
    assert!(all.iter().all(|c| matches!(c.error(), Some(CompletionError::Miss { .. }))));
}

#[test]
fn distinct_prompts_get_distinct_hashes() {
    let forge = Forge::builtin();
    let gw = Gateway::new(BackendConfig::preset("replay").unwrap(), Replay::new(Cassette::default())).unwrap();
    let mut cassette = Cassette::default();
    for p in lt20().problems.iter().take(10) {
        let req = gw.request(&forge.prove(p, Strategy::FS_CoT).unwrap_or_else(|_| forge.prove(p, Strategy::ZS).unwrap()));
        cassette.insert(logichint_gateway::Entry::new(&req, "x"));
    }
    assert_eq!(cassette.len(), 10);
}

#[test]
fn parallel_completion_keeps_order() {
    let n = 6;
    let (url, _, server) = serve((0..n).map(|_| (200, OK.into())).collect());
    let mut cfg = openai(&url);
    cfg.max_concurrent = 3;
    let gw = Gateway::new(cfg.clone(), logichint_gateway::OpenAiCompatible::new(&cfg, "k".into())).unwrap();
    let forge = Forge::builtin();
    let bundles: Vec<PromptBundle> =
        lt20().problems.iter().take(n).map(|p| forge.prove(p, Strategy::ZS).unwrap()).collect();
    let out = gw.complete_all(&bundles);
    server.join().unwrap();
    for (b, c) in bundles.iter().zip(&out) {
        assert_eq!(c.request_hash, gw.request(b).hash);
        assert_eq!(c.text(), Some("hello"));
    }
}

//! Golden-file tests for every subcommand, run offline against the fixtures
//! in `data/`. Set `LOGICHINT_BLESS=1` to rewrite the golden files.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_logichint"))
        .args(args)
        .current_dir(root())
        .output()
        .unwrap();
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Compares exit code, stdout and stderr against `tests/golden/<name>.txt`,
/// with `tmp` (if any) shown as `$TMP`.
fn golden(name: &str, r: &Run, tmp: Option<&Path>) {
    let mut text = format!(
        "exit: {}\n--- stdout\n{}--- stderr\n{}",
        r.code, r.stdout, r.stderr
    );
    if let Some(tmp) = tmp {
        text = text.replace(&tmp.display().to_string(), "$TMP");
    }
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.txt"));
    if std::env::var_os("LOGICHINT_BLESS").is_some_and(|v| v == "1") {
        std::fs::write(&path, &text).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("{} is missing; run with LOGICHINT_BLESS=1", path.display()));
    assert_eq!(text, want, "{name} differs from its golden file");
}

fn check(name: &str, args: &[&str], code: i32) {
    let r = run(args);
    assert_eq!(r.code, code, "{name}: stderr {}", r.stderr);
    golden(name, &r, None);
}

#[test]
fn parse() {
    check("parse", &["parse", "A -> B & ~C | D"], 0);
    check("parse_json", &["--json", "parse", "~~(A -> 0)"], 0);
    check("parse_error", &["parse", "A -> (B"], 2);
    check("parse_error_json", &["--json", "parse", "A &"], 2);
}

#[test]
fn check_proof() {
    check(
        "check_proof",
        &["check-proof", "data/fixtures/cli/t1-1.proof.json"],
        0,
    );
    check(
        "check_proof_flawed",
        &["check-proof", "data/fixtures/cli/t1-1.flawed.proof.json"],
        3,
    );
    check(
        "check_proof_json",
        &[
            "--json",
            "check-proof",
            "data/fixtures/cli/t1-1.flawed.proof.json",
        ],
        3,
    );
    check(
        "check_proof_missing",
        &["check-proof", "data/fixtures/cli/nope.json"],
        5,
    );
}

#[test]
fn solve() {
    check("solve", &["solve", "t1-1", "t3-2", "post-4"], 0);
    check("solve_indirect", &["solve", "--indirect", "t1-2"], 0);
    check("solve_fuzz", &["--seed", "7", "solve", "--fuzz", "5"], 0);
    check("solve_bounded", &["solve", "--max-depth", "1", "t3-2"], 3);
    check("solve_unknown", &["solve", "t9-9"], 2);
}

#[test]
fn hint() {
    check(
        "hint_search",
        &["hint", "--problem", "t3-1", "--steps-done", "1"],
        0,
    );
    check(
        "hint_search_json",
        &["--json", "hint", "--problem", "t4-2", "--steps-done", "2"],
        0,
    );
    check(
        "hint_llm",
        &[
            "--cassette",
            "data/fixtures/hints1/cassette.ndjson",
            "hint",
            "--source",
            "llm",
            "data/fixtures/hints1/states.json",
        ],
        3,
    );
    check(
        "hint_llm_no_backend",
        &["hint", "--source", "llm", "--problem", "t1-1"],
        4,
    );
}

#[test]
fn extract_pss() {
    check(
        "extract_pss",
        &["extract-pss", "data/fixtures/logs/t3-2.events.ndjson"],
        0,
    );
    let tmp = tempfile::tempdir().unwrap();
    let dest = tmp.path().join("pss.json");
    let r = run(&[
        "extract-pss",
        "data/fixtures/logs/t3-2.events.ndjson",
        "--out",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    golden("extract_pss_out", &r, Some(tmp.path()));
    let direct = run(&["extract-pss", "data/fixtures/logs/t3-2.events.ndjson"]).stdout;
    assert_eq!(std::fs::read_to_string(&dest).unwrap(), direct);
    // The written states feed straight back into `hint`.
    let r = run(&["hint", dest.to_str().unwrap()]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    golden("extract_pss_hint", &r, Some(tmp.path()));
}

#[test]
fn prompt() {
    check(
        "prompt_prove_zs",
        &[
            "prompt",
            "--task",
            "prove",
            "--strategy",
            "ZS",
            "--problem",
            "t4-1",
        ],
        0,
    );
    check(
        "prompt_hint_fs_cot",
        &[
            "prompt",
            "--task",
            "hint",
            "--strategy",
            "FS_CoT",
            "--problem",
            "t3-1",
            "--steps-done",
            "1",
        ],
        0,
    );
    check(
        "prompt_grade",
        &[
            "prompt",
            "--task",
            "grade",
            "--problem",
            "t1-1",
            "--steps-done",
            "1",
            "--explanation",
            "Use P2 with S1.",
        ],
        0,
    );
    check(
        "prompt_grade_no_explanation",
        &["prompt", "--task", "grade", "--problem", "t1-1"],
        2,
    );
}

#[test]
fn eval_prove() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run1");
    let r = run(&[
        "--cassette",
        "data/fixtures/run1/cassette.ndjson",
        "eval",
        "--strategy",
        "FS_CoT",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    golden("eval_prove", &r, Some(tmp.path()));
    let csv = std::fs::read_to_string(out.join("report.csv")).unwrap();
    golden(
        "eval_prove_csv",
        &Run {
            code: 0,
            stdout: csv,
            stderr: String::new(),
        },
        None,
    );
    assert!(out.join("summary.json").exists());
}

#[test]
fn eval_hint_with_ratings_then_grade() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("hints1");
    let r = run(&[
        "--cassette",
        "data/fixtures/hints1/cassette.ndjson",
        "eval",
        "--states",
        "data/fixtures/hints1/states.json",
        "--strategy",
        "FS_CoT",
        "--out",
        out.to_str().unwrap(),
        "--ratings",
        "data/fixtures/ratings/human.csv",
        "data/fixtures/ratings/llm.csv",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    golden("eval_hint", &r, Some(tmp.path()));
    for f in [
        "report.csv",
        "summary.json",
        "agreement.json",
        "explanations.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }

    let items = out.join("explanations.json");
    let items = items.to_str().unwrap();
    let r = run(&[
        "--cassette",
        "data/fixtures/grade1/cassette.ndjson",
        "grade",
        items,
        "--fraction",
        "1",
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    golden("grade_all", &r, Some(tmp.path()));

    let r = run(&["grade", items, "--sample-only"]);
    assert_eq!(r.code, 0);
    golden("grade_sample", &r, Some(tmp.path()));

    let csv = tmp.path().join("llm.csv");
    let r = run(&[
        "--cassette",
        "data/fixtures/grade1/cassette.ndjson",
        "--seed",
        "3",
        "grade",
        items,
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    golden("grade_out", &r, Some(tmp.path()));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 4);

    // Without recordings for the grading prompts every request misses.
    let r = run(&[
        "--cassette",
        "data/fixtures/run1/cassette.ndjson",
        "grade",
        items,
    ]);
    assert_eq!(r.code, 4, "{}", r.stderr);
}

#[test]
fn eval_failures() {
    check("eval_no_backend", &["eval"], 4);
    check(
        "eval_missing_cassette",
        &["--cassette", "data/fixtures/none.ndjson", "eval"],
        5,
    );
    check(
        "eval_all_misses",
        &[
            "--cassette",
            "data/fixtures/run1/cassette.ndjson",
            "eval",
            "--strategy",
            "ZS",
        ],
        4,
    );
    check(
        "eval_bad_strategy",
        &["--cassette", "x", "eval", "--strategy", "FS_Nope"],
        2,
    );
}

#[test]
fn stats() {
    let tmp = tempfile::tempdir().unwrap();
    let r = run(&[
        "stats",
        "--ratings",
        "data/fixtures/ratings/human.csv",
        "data/fixtures/ratings/llm.csv",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    golden("stats", &r, Some(tmp.path()));
    assert!(tmp.path().join("agreement.json").exists());
    check(
        "stats_json",
        &[
            "--json",
            "stats",
            "--ratings",
            "data/fixtures/ratings/human.csv",
            "data/fixtures/ratings/llm.csv",
        ],
        0,
    );
    check(
        "stats_self",
        &[
            "stats",
            "--ratings",
            "data/fixtures/ratings/human.csv",
            "data/fixtures/ratings/human.csv",
        ],
        0,
    );
}

#[test]
fn config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("logichint.toml");
    let cassette = root().join("data/fixtures/grade1/cassette.ndjson");
    std::fs::write(
        &cfg,
        format!(
            "seed = 3\ncassette = {:?}\ndata_dir = {:?}\n",
            cassette.display().to_string(),
            root().join("data")
        ),
    )
    .unwrap();
    let items = tmp.path().join("items");
    run(&[
        "--cassette",
        "data/fixtures/hints1/cassette.ndjson",
        "eval",
        "--states",
        "data/fixtures/hints1/states.json",
        "--strategy",
        "FS_CoT",
        "--out",
        items.to_str().unwrap(),
    ]);
    let items = items.join("explanations.json");
    let with_config = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "grade",
        items.to_str().unwrap(),
    ]);
    let with_flags = run(&[
        "--seed",
        "3",
        "--cassette",
        "data/fixtures/grade1/cassette.ndjson",
        "grade",
        items.to_str().unwrap(),
    ]);
    assert_eq!(with_config.code, 0, "{}", with_config.stderr);
    assert_eq!(with_config.stdout, with_flags.stdout);

    std::fs::write(&cfg, "seed = \"three\"\n").unwrap();
    let r = run(&["--config", cfg.to_str().unwrap(), "parse", "A"]);
    assert_eq!(r.code, 2);
}

#[test]
fn serve_dry_run() {
    let tmp = tempfile::tempdir().unwrap();
    let sessions = tmp.path().join("var");
    let r = run(&[
        "serve",
        "--dry-run",
        "--sessions",
        sessions.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    golden("serve_dry_run", &r, Some(tmp.path()));
    let r = run(&[
        "--cassette",
        "data/fixtures/hints1/cassette.ndjson",
        "--data-dir",
        "data",
        "--json",
        "serve",
        "--dry-run",
        "--sessions",
        sessions.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    golden("serve_dry_run_json", &r, Some(tmp.path()));
}

#[test]
fn serve_answers_requests() {
    let tmp = tempfile::tempdir().unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_logichint"))
        .args([
            "serve",
            "--bind",
            "127.0.0.1:0",
            "--sessions",
            tmp.path().to_str().unwrap(),
        ])
        .current_dir(root())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut stderr = BufReader::new(child.stderr.take().unwrap());
    let mut line = String::new();
    stderr.read_line(&mut line).unwrap();
    let addr = line
        .trim()
        .strip_prefix("listening on http://")
        .unwrap_or_else(|| panic!("{line}"))
        .to_string();

    let mut stream = TcpStream::connect(&addr).unwrap();
    write!(
        stream,
        "GET /problems HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n"
    )
    .unwrap();
    let mut response = String::new();
    stream.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    child.wait().unwrap();

    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(response.contains("\"t1-1\""));
}

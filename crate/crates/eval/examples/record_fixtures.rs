//! Rebuilds the replay fixtures under `data/fixtures` from their
//! hand-written responses:
//!
//!     cargo run -p logichint-eval --example record_fixtures -- data/fixtures
//!
//! Each `<run>/responses.json` lists one response per problem (prove) or per
//! solution prefix (hint, grade). The prompt for each is built with the builtin
//! forge, and the response is stored in `<run>/cassette.ndjson` under that
//! prompt's request hash for the `replay` preset. Hint runs also get a
//! `<run>/states.json`.

use std::path::{Path, PathBuf};

use logichint_core::data::{lt20, lt20_solutions};
use logichint_core::kernel::{to_document_string, Pss};
use logichint_core::pss::{PssRecord, PssSet};
use logichint_gateway::{BackendConfig, Cassette, Entry, Gateway, Replay};
use logichint_prompt::{Forge, Strategy};
use serde_json::Value;

fn main() {
    let root: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "data/fixtures".into()).into();
    let gateway = Gateway::new(BackendConfig::preset("replay").unwrap(), Replay::new(Cassette::default())).unwrap();
    let forge = Forge::builtin();
    for run in ["run1", "hints1", "grade1"] {
        record(&root.join(run), &forge, &gateway);
    }
}

fn record(dir: &Path, forge: &Forge, gateway: &Gateway) {
    let fixture: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("responses.json")).unwrap()).unwrap();
    let strategy: Strategy = fixture["strategy"].as_str().unwrap().parse().unwrap();
    let problems = lt20();
    let solutions = lt20_solutions();
    let mut cassette = Cassette::default();
    let mut states = Vec::new();
    for r in fixture["responses"].as_array().unwrap() {
        let problem = problems.get(r["problem"].as_str().unwrap()).unwrap().clone();
        let text = r["text"].as_str().unwrap();
        let prefix = |k: usize| {
            let mut state = Pss::new(problem.clone(), solutions.get(&problem.id).unwrap().steps[..k].to_vec());
            state.order = k;
            state
        };
        let bundle = match fixture["task"].as_str().unwrap() {
            "prove" => forge.prove(&problem, strategy).unwrap(),
            "grade" => {
                let state = prefix(r["steps_done"].as_u64().unwrap() as usize);
                forge.grade(r["explanation"].as_str().unwrap(), &state).unwrap()
            }
            _ => {
                let state = prefix(r["steps_done"].as_u64().unwrap() as usize);
                let bundle = forge.hint(&state, strategy).unwrap();
                states.push(PssRecord::new(state));
                bundle
            }
        };
        cassette.insert(Entry::new(&gateway.request(&bundle), text));
    }
    cassette.save(&dir.join("cassette.ndjson")).unwrap();
    if !states.is_empty() {
        std::fs::write(dir.join("states.json"), to_document_string(&PssSet { states })).unwrap();
    }
    println!("{}: {} entries", dir.display(), cassette.len());
}

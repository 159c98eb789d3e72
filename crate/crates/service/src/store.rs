//! Problems, sessions, and the append-only session logs on disk.
//!
//! A session log uses the interaction-log format, so a finished session can
//! be fed straight to state extraction. The start line also carries the
//! creation time.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use logichint_core::data::{load_dir, lt20, LoadError};
use logichint_core::kernel::{check_step, Problem, ProofStep, Pss, StepVerdict};
use logichint_core::pss::{Event, InteractionLog};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

/// Problems served by the tutor, in a fixed order.
#[derive(Debug, Clone)]
pub struct ProblemStore {
    problems: Vec<Problem>,
}

impl ProblemStore {
    pub fn new(problems: Vec<Problem>) -> Self {
        ProblemStore { problems }
    }

    pub fn bundled() -> Self {
        ProblemStore::new(lt20().problems)
    }

    /// Loads the problems in `dir` (see [`load_dir`]); solution files are
    /// ignored.
    pub fn from_dir(dir: &Path) -> Result<Self, StoreError> {
        let (set, _) = load_dir(dir).map_err(|e| match e {
            LoadError::Io { path, source } => StoreError::Io { path, source },
            LoadError::Invalid { path, message } => StoreError::Invalid { path, message },
        })?;
        Ok(ProblemStore::new(set.problems))
    }

    pub fn all(&self) -> &[Problem] {
        &self.problems
    }

    pub fn get(&self, id: &str) -> Option<&Problem> {
        self.problems.iter().find(|p| p.id == id)
    }
}

/// Milliseconds since the Unix epoch.
pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename = "start")]
struct Header {
    problem: String,
    #[serde(default)]
    created: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub id: String,
    pub state: Pss,
    pub hint_count: usize,
    pub events: Vec<Event>,
    pub created: u64,
    pub updated: u64,
}

impl Session {
    pub fn new(id: String, problem: Problem, created: u64) -> Self {
        Session { id, state: Pss::initial(problem), hint_count: 0, events: Vec::new(), created, updated: created }
    }

    pub fn problem(&self) -> &Problem {
        &self.state.problem
    }

    /// Next timestamp, never earlier than the last one.
    fn tick(&self) -> u64 {
        now_ms().max(self.updated)
    }

    /// The session with `step` appended if it is valid, plus the event to
    /// persist. An invalid step leaves nothing to persist.
    pub fn derive(&self, step: &ProofStep) -> (StepVerdict, Option<(Session, Event)>) {
        let verdict = check_step(&self.state, step);
        if !verdict.is_valid() {
            return (verdict, None);
        }
        let timestamp = self.tick();
        let event = Event::Derive {
            formula: step.formula.clone(),
            rule: step.rule,
            parents: step.parents.clone(),
            site: step.site.clone(),
            direction: step.direction,
            timestamp,
        };
        let mut next = self.clone();
        next.apply(&event).expect("validated step applies");
        (verdict, Some((next, event)))
    }

    pub fn hint_requested(&self) -> (Session, Event) {
        let event = Event::HintRequest { timestamp: self.tick() };
        let mut next = self.clone();
        next.apply(&event).expect("hint requests always apply");
        (next, event)
    }

    fn apply(&mut self, event: &Event) -> Result<(), String> {
        match event {
            Event::Derive { formula, rule, parents, site, direction, .. } => {
                let mut step = ProofStep::new(self.state.derived.len() + 1, formula.clone(), *rule, parents.clone());
                step.site = site.clone();
                step.direction = *direction;
                if let StepVerdict::Invalid(e) = check_step(&self.state, &step) {
                    return Err(format!("step {} does not check: {e}", step.index));
                }
                self.state = self.state.with_step(&step);
            }
            Event::HintRequest { .. } => self.hint_count += 1,
            Event::Delete { .. } => return Err("delete events are not supported in sessions".into()),
        }
        self.updated = self.updated.max(event.timestamp());
        self.events.push(event.clone());
        self.state.order = self.events.len();
        Ok(())
    }
}

/// Session logs under `<root>/sessions/<id>.ndjson`.
#[derive(Debug, Clone)]
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    pub fn open(data_dir: &Path) -> Result<Self, StoreError> {
        let dir = data_dir.join("sessions");
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(SessionStore { dir })
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.ndjson"))
    }

    pub fn create(&self, session: &Session) -> Result<(), StoreError> {
        let header = Header { problem: session.problem().id.clone(), created: session.created };
        let mut line = serde_json::to_string(&header).expect("header serializes");
        line.push('\n');
        let path = self.path(&session.id);
        fs::write(&path, line).map_err(io_err(&path))
    }

    pub fn append(&self, id: &str, event: &Event) -> Result<(), StoreError> {
        let path = self.path(id);
        let mut line = serde_json::to_string(event).expect("event serializes");
        line.push('\n');
        let mut file = OpenOptions::new().append(true).open(&path).map_err(io_err(&path))?;
        file.write_all(line.as_bytes()).map_err(io_err(&path))?;
        file.flush().map_err(io_err(&path))
    }

    /// Replays every log. Logs that fail to load are returned separately so
    /// one bad file does not keep the service down.
    pub fn load_all(&self, problems: &ProblemStore) -> Result<(HashMap<String, Session>, Vec<StoreError>), StoreError> {
        let mut sessions = HashMap::new();
        let mut errors = Vec::new();
        let mut paths: Vec<PathBuf> = fs::read_dir(&self.dir)
            .map_err(io_err(&self.dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "ndjson"))
            .collect();
        paths.sort();
        for path in paths {
            match Self::load(&path, problems) {
                Ok(s) => {
                    sessions.insert(s.id.clone(), s);
                }
                Err(e) => errors.push(e),
            }
        }
        Ok((sessions, errors))
    }

    fn load(path: &Path, problems: &ProblemStore) -> Result<Session, StoreError> {
        let invalid = |message: String| StoreError::Invalid { path: path.to_path_buf(), message };
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let first = text.lines().next().unwrap_or_default();
        let header: Header = serde_json::from_str(first).map_err(|e| invalid(format!("line 1: {e}")))?;
        let log = InteractionLog::from_ndjson(&text).map_err(|e| invalid(e.to_string()))?;
        let problem = problems
            .get(&header.problem)
            .ok_or_else(|| invalid(format!("unknown problem `{}`", header.problem)))?;
        let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_owned();
        let mut session = Session::new(id, problem.clone(), header.created);
        for (i, event) in log.events.iter().enumerate() {
            session.apply(event).map_err(|m| invalid(format!("event {}: {m}", i + 1)))?;
        }
        Ok(session)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use logichint_core::formula::parse;
    use logichint_core::kernel::StepRef;
    use logichint_core::rules::RuleId;

    #[test]
    fn replay_reproduces_session() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let problems = ProblemStore::bundled();
        let s0 = Session::new("abc".into(), problems.get("t1-1").unwrap().clone(), 5);
        store.create(&s0).unwrap();
        let step = ProofStep::new(1, parse("A").unwrap(), RuleId::Simp, vec![StepRef::Premise(1)]);
        let (verdict, next) = s0.derive(&step);
        assert!(verdict.is_valid());
        let (s1, e1) = next.unwrap();
        store.append("abc", &e1).unwrap();
        let (s2, e2) = s1.hint_requested();
        store.append("abc", &e2).unwrap();

        let (loaded, errors) = store.load_all(&problems).unwrap();
        assert!(errors.is_empty());
        assert_eq!(loaded["abc"], s2);

        let log = InteractionLog::from_ndjson(&fs::read_to_string(dir.path().join("sessions/abc.ndjson")).unwrap());
        assert_eq!(log.unwrap().events.len(), 2);
    }

    #[test]
    fn tampered_log_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        fs::write(
            dir.path().join("sessions/bad.ndjson"),
            "{\"type\":\"start\",\"problem\":\"t1-1\"}\n{\"type\":\"derive\",\"formula\":\"D\",\"rule\":\"MP\",\"parents\":[\"P3\",\"S2\"]}\n",
        )
        .unwrap();
        let (loaded, errors) = store.load_all(&ProblemStore::bundled()).unwrap();
        assert!(loaded.is_empty());
        assert!(errors[0].to_string().contains("event 1"), "{}", errors[0]);
    }
}

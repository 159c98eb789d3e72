//! The bundled twenty-problem set and its reference solutions, and loading
//! other sets from a directory.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::kernel::{from_document, Problem, ProblemSet, SolutionSet};

const LT20: &str = include_str!("../../../data/problems/lt20.json");
const LT20_SOLUTIONS: &str = include_str!("../../../data/problems/lt20.solutions.json");

pub fn lt20() -> ProblemSet {
    ProblemSet::from_json(LT20).expect("bundled problem set parses")
}

pub fn lt20_solutions() -> SolutionSet {
    SolutionSet::from_json(LT20_SOLUTIONS).expect("bundled solutions parse")
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

/// Reads every `*.json` file in `dir` in file-name order. `*.solutions.json`
/// files hold solution sets; any other file holds a problem set or a single
/// problem. Problem ids must be unique across files.
pub fn load_dir(dir: &Path) -> Result<(ProblemSet, SolutionSet), LoadError> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| LoadError::Io { path, source }
    };
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut problems: Vec<Problem> = Vec::new();
    let mut solutions = SolutionSet { solutions: Vec::new() };
    for path in paths {
        let text = fs::read_to_string(&path).map_err(io(&path))?;
        let invalid = |message: String| LoadError::Invalid { path: path.clone(), message };
        if path.to_string_lossy().ends_with(".solutions.json") {
            let set = SolutionSet::from_json(&text).map_err(|e| invalid(e.to_string()))?;
            solutions.solutions.extend(set.solutions);
            continue;
        }
        let found = match from_document::<ProblemSet>(&text) {
            Ok(set) => set.problems,
            Err(_) => vec![from_document::<Problem>(&text).map_err(|e| invalid(e.to_string()))?],
        };
        for p in found {
            if problems.iter().any(|q| q.id == p.id) {
                return Err(invalid(format!("duplicate problem id `{}`", p.id)));
            }
            problems.push(p);
        }
    }
    Ok((ProblemSet { problems }, solutions))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{check_proof, Level, Proof, ProofMode};

    #[test]
    fn bundled_solutions_are_complete() {
        let set = lt20();
        let solutions = lt20_solutions();
        assert_eq!(set.problems.len(), 20);
        for p in &set.problems {
            let s = solutions.get(&p.id).expect("every problem has a solution");
            let report = check_proof(&Proof::new(p.clone(), s.steps.clone(), ProofMode::Direct));
            assert!(report.complete, "{}", p.id);
            assert_eq!(report.valid_steps, report.total_steps, "{}", p.id);
        }
        let posttest = set.problems.iter().filter(|p| p.level == Level::Posttest).count();
        assert_eq!(posttest, 6);
    }

    #[test]
    fn repository_data_dir_matches_bundle() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/problems");
        let (problems, solutions) = load_dir(&dir).unwrap();
        assert_eq!(problems, lt20());
        assert_eq!(solutions, lt20_solutions());
    }
}

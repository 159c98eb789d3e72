//! The optional TOML config file and how global flags override it.
//!
//! ```toml
//! data_dir = "data"          # problems/*.json and problems/*.solutions.json
//! seed = 7
//! cassette = "run.ndjson"    # replay backend
//! backend = "gpt-4o"         # a preset name, or a [backend] table
//! model = "gpt-4o-mini"
//!
//! [search]
//! max_depth = 12
//!
//! [service]
//! bind = "0.0.0.0:8080"
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use logichint_core::data::{load_dir, lt20, lt20_solutions};
use logichint_core::kernel::{ProblemSet, SolutionSet};
use logichint_core::random::DEFAULT_SEED;
use logichint_core::search::SearchConfig;
use logichint_gateway::{BackendConfig, BackendKind, CassetteError, Gateway, GatewayError};
use logichint_service::ServiceConfig;
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum BackendSpec {
    Preset(String),
    Table(Box<BackendConfig>),
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    data_dir: Option<PathBuf>,
    seed: Option<u64>,
    cassette: Option<PathBuf>,
    backend: Option<BackendSpec>,
    model: Option<String>,
    search: Option<SearchConfig>,
    service: Option<ServiceConfig>,
}

/// Global flags as given on the command line.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub data_dir: Option<PathBuf>,
    pub backend: Option<String>,
    pub cassette: Option<PathBuf>,
    pub model: Option<String>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub data_dir: Option<PathBuf>,
    pub seed: u64,
    pub backend: Option<BackendConfig>,
    pub search: SearchConfig,
    pub service: ServiceConfig,
}

fn rebase(base: &Path, path: PathBuf) -> PathBuf {
    if path.is_absolute() {
        path
    } else {
        base.join(path)
    }
}

fn backend_named(name: &str) -> Result<BackendConfig, CliError> {
    if name.ends_with(".toml") {
        let path = Path::new(name);
        let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        return BackendConfig::from_toml(&text).map_err(|e| CliError::parse(path.display(), e));
    }
    BackendConfig::preset(name).map_err(|e| CliError::Parse(e.to_string()))
}

impl Settings {
    pub fn resolve(flags: Overrides) -> Result<Settings, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
                let mut file: FileConfig =
                    toml::from_str(&text).map_err(|e| CliError::parse(path.display(), e))?;
                let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
                file.data_dir = file.data_dir.map(|p| rebase(&base, p));
                file.cassette = file.cassette.map(|p| rebase(&base, p));
                if let Some(BackendSpec::Table(b)) = &mut file.backend {
                    b.cassette = b.cassette.take().map(|p| rebase(&base, p));
                }
                if let Some(s) = &mut file.service {
                    s.data_dir = rebase(&base, s.data_dir.clone());
                    s.problems_dir = s.problems_dir.take().map(|p| rebase(&base, p));
                }
                file
            }
            None => FileConfig::default(),
        };

        let backend = match flags.backend {
            Some(name) => Some(backend_named(&name)?),
            None => match file.backend {
                Some(BackendSpec::Preset(name)) => Some(backend_named(&name)?),
                Some(BackendSpec::Table(b)) => Some(*b),
                None => None,
            },
        };
        let cassette = flags.cassette.or(file.cassette);
        let model = flags.model.or(file.model);
        let backend = match (backend, cassette) {
            (None, None) => None,
            (None, Some(c)) => Some(BackendConfig::replay(
                model.as_deref().unwrap_or("deepseek-v3"),
                c,
            )),
            (Some(mut b), c) => {
                if let Some(c) = c {
                    if b.kind != BackendKind::Replay {
                        return Err(CliError::Parse(format!(
                            "--cassette needs a replay backend, not `{}`",
                            b.id
                        )));
                    }
                    b.cassette = Some(c);
                }
                if let Some(m) = model {
                    b.model = m;
                }
                Some(b)
            }
        };

        let search = file.search.unwrap_or_default();
        search
            .validate()
            .map_err(|e| CliError::Parse(e.to_string()))?;
        Ok(Settings {
            data_dir: flags.data_dir.or(file.data_dir),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            backend,
            search,
            service: file.service.unwrap_or_default(),
        })
    }

    /// Problems and reference solutions: `<data_dir>/problems` when a data
    /// directory is set, otherwise the bundled set.
    pub fn problems(&self) -> Result<(ProblemSet, SolutionSet), CliError> {
        match &self.data_dir {
            None => Ok((lt20(), lt20_solutions())),
            Some(dir) => load_dir(&dir.join("problems")).map_err(|e| match e {
                logichint_core::data::LoadError::Io { .. } => CliError::Io(e.to_string()),
                logichint_core::data::LoadError::Invalid { .. } => CliError::Parse(e.to_string()),
            }),
        }
    }

    pub fn gateway(&self) -> Result<Gateway, CliError> {
        let cfg = self.backend.clone().ok_or_else(|| {
            CliError::Backend("no backend configured (pass --cassette or --backend)".into())
        })?;
        Gateway::from_config(cfg).map_err(|e| match e {
            GatewayError::Cassette(c @ CassetteError::Corrupt { .. }) => {
                CliError::Parse(c.to_string())
            }
            GatewayError::Cassette(c) => CliError::Io(c.to_string()),
            other => CliError::Backend(other.to_string()),
        })
    }
}

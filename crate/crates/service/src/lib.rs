//! REST service for the tutor: problems, sessions, step checking and hints
//! from proof search or a language model. Sessions persist as append-only
//! event logs and are replayed on start.

mod api;
mod config;
mod store;

use std::io;

use logichint_gateway::{Gateway, GatewayError};
use thiserror::Error;

pub use api::{router, ApiError, AppState};
pub use config::{ConfigError, ServiceConfig};
pub use store::{now_ms, ProblemStore, Session, SessionStore, StoreError};

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Backend(#[from] GatewayError),
    #[error("binding {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Builds the router described by `cfg`, replaying stored sessions.
pub fn build(cfg: &ServiceConfig) -> Result<axum::Router, ServeError> {
    let problems = match &cfg.problems_dir {
        Some(dir) => ProblemStore::from_dir(dir)?,
        None => ProblemStore::bundled(),
    };
    let store = SessionStore::open(&cfg.data_dir)?;
    let gateway = cfg.backend.clone().map(Gateway::from_config).transpose()?;
    let (state, skipped) = AppState::new(problems, store, gateway, cfg.hint_strategy, cfg.search.clone())?;
    for e in skipped {
        eprintln!("skipping session log: {e}");
    }
    Ok(router(state, &cfg.cors_origins))
}

/// Serves until Ctrl-C.
pub async fn serve(cfg: &ServiceConfig) -> Result<(), ServeError> {
    let app = build(cfg)?;
    let listener = tokio::net::TcpListener::bind(&cfg.bind)
        .await
        .map_err(|source| ServeError::Bind { addr: cfg.bind.clone(), source })?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

//! HTTP API for loading statecharts and steering live simulation sessions.
//!
//! Everything is held in memory; nothing survives a restart. Request and
//! response shapes are documented in `docs/api.md`.

mod api;
mod store;
mod view;

use std::future::Future;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use axum::Router;
use tokio::net::TcpListener;

pub use view::{DiagramState, DiagramTransition, DiagramView};

pub const DEFAULT_PORT: u16 = 8732;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub max_models: usize,
    pub max_sessions: usize,
    /// Largest accepted request body, in bytes.
    pub body_limit: usize,
    /// Directory with the web UI's static files, served under `/`.
    pub ui_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            max_models: 64,
            max_sessions: 256,
            body_limit: 256 * 1024,
            ui_dir: None,
        }
    }
}

#[derive(Clone)]
pub(crate) struct AppState {
    store: Arc<Mutex<store::Store>>,
}

pub fn router(config: &ServiceConfig) -> Router {
    let state = AppState {
        store: Arc::new(Mutex::new(store::Store::new(
            config.max_models,
            config.max_sessions,
        ))),
    };
    let app = api::routes(config.body_limit).with_state(state);
    match &config.ui_dir {
        Some(dir) => app.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => app,
    }
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    config: &ServiceConfig,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(config))
        .with_graceful_shutdown(shutdown)
        .await
}

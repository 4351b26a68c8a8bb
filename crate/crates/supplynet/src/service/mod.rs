//! HTTP JSON API of the collaboration platform.
//!
//! Reads are public. Writes need a bearer token obtained through the
//! claim/verify flow and bound to a company involved in the write. Errors are
//! `{"code": ..., "message": ...}` objects; unknown query parameters are
//! rejected with 400.

pub mod auth;
pub mod config;
pub mod mail;
pub mod outbox;

mod handlers;

use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;
use supplynet_core::matching::Threshold;
use supplynet_core::SupplyGraph;

use crate::clock::{Clock, SystemClock};
use crate::files::{save_snapshot, FileError};
use auth::AuthStore;
use config::{ServiceConfig, SmtpConfig};
use outbox::Outbox;

pub struct AppState {
    pub graph: RwLock<SupplyGraph>,
    pub auth: Mutex<AuthStore>,
    pub outbox: Mutex<Outbox>,
    pub clock: Arc<dyn Clock>,
    pub threshold: Threshold,
    pub snapshot: Option<PathBuf>,
    pub smtp: Option<SmtpConfig>,
}

impl AppState {
    /// In-memory state around `graph`, for tests and embedding.
    pub fn new(graph: SupplyGraph, clock: Arc<dyn Clock>) -> Self {
        AppState {
            graph: RwLock::new(graph),
            auth: Mutex::new(AuthStore::in_memory()),
            outbox: Mutex::new(Outbox::in_memory()),
            clock,
            threshold: Threshold::DEFAULT,
            snapshot: None,
            smtp: None,
        }
    }

    /// State described by a service configuration; the snapshot is required.
    pub fn from_config(config: &ServiceConfig, graph: SupplyGraph) -> Result<Self, String> {
        let threshold = Threshold::new(config.match_threshold).map_err(|e| e.to_string())?;
        let (auth, outbox) = match &config.state_dir {
            Some(dir) => (
                AuthStore::open(&dir.join("auth.json")).map_err(|e| e.to_string())?,
                Outbox::open(&dir.join("outbox.jsonl")).map_err(|e| format!("{}: {e}", dir.display()))?,
            ),
            None => (AuthStore::in_memory(), Outbox::in_memory()),
        };
        Ok(AppState {
            graph: RwLock::new(graph),
            auth: Mutex::new(auth.with_ttls(config.code_ttl_secs, config.token_ttl_secs)),
            outbox: Mutex::new(outbox),
            clock: Arc::new(SystemClock),
            threshold,
            snapshot: config.snapshot.clone(),
            smtp: config.smtp.clone(),
        })
    }

    pub(crate) fn persist(&self, graph: &SupplyGraph) -> Result<(), ApiError> {
        match &self.snapshot {
            Some(path) => save_snapshot(graph, path).map_err(ApiError::from),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code,
                message: message.into(),
            },
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn unauthorized(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "unauthorized", message)
    }

    pub fn forbidden(message: impl Into<String>) -> Self {
        Self::new(StatusCode::FORBIDDEN, "forbidden", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    pub fn gone(message: impl Into<String>) -> Self {
        Self::new(StatusCode::GONE, "gone", message)
    }

    pub fn unprocessable(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "unprocessable", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl From<FileError> for ApiError {
    fn from(e: FileError) -> Self {
        tracing::error!(error = %e, "persistence failure");
        ApiError::internal(e.to_string())
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        tracing::error!(error = %e, "persistence failure");
        ApiError::internal(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/health", get(handlers::health))
        .route("/api/companies", get(handlers::list_companies))
        .route("/api/companies/{id}", get(handlers::company_detail))
        .route(
            "/api/companies/{id}/suppliers",
            get(handlers::list_suppliers).post(handlers::add_supplier),
        )
        .route("/api/companies/{id}/suppliers/upload", post(handlers::upload_suppliers))
        .route("/api/companies/{id}/customers", get(handlers::list_customers))
        .route("/api/companies/{id}/nudge", get(handlers::nudge))
        .route("/api/auth/claim", post(handlers::claim))
        .route("/api/auth/verify", post(handlers::verify))
        .route("/api/auth/revoke", post(handlers::revoke))
        .route(
            "/api/relations/{customer}/{supplier}/{origin}/review",
            post(handlers::review),
        )
        .route("/api/analytics/transparency", get(handlers::transparency))
        .fallback(handlers::not_found)
        .with_state(state)
}

/// Serves until ctrl-c.
pub async fn serve(state: Arc<AppState>, listen: &str, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind((listen, port)).await?;
    tracing::info!(addr = %listener.local_addr()?, "serving");
    if let Some(smtp) = state.smtp.clone() {
        let state = state.clone();
        tokio::spawn(async move {
            loop {
                tokio::time::sleep(std::time::Duration::from_secs(30)).await;
                let state = state.clone();
                let smtp = smtp.clone();
                let result = tokio::task::spawn_blocking(move || {
                    let mut outbox = state.outbox.lock().expect("outbox lock poisoned");
                    mail::deliver_pending(&mut outbox, &smtp)
                })
                .await;
                match result {
                    Ok(Ok(n)) if n > 0 => tracing::info!(delivered = n, "outbox delivery"),
                    Ok(Err(e)) => tracing::warn!(error = %e, "outbox delivery failed"),
                    _ => {}
                }
            }
        });
    }
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

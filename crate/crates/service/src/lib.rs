//! JSON over HTTP sessions for interactive morph experiments.
//!
//! Each session holds a [`SessionDocument`](knotmorph_core::io::SessionDocument)
//! and a revision counter. Mutations name the revision they were based on
//! and fail with 409 when it is stale. Transition searches run as
//! background jobs that can be polled and cancelled.

pub mod api;
pub mod error;
pub mod payload;
pub mod state;

use std::sync::Arc;

use axum::Router;

pub use state::AppState;

pub const API_VERSION: &str = "1.0";

pub fn router() -> Router {
    api::routes(Arc::new(AppState::new()))
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router()).await
}

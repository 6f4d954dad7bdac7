use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::json;

use super::{SearchEngine, SearchRequest};
use crate::error::{Error, Result};
use crate::ranking::PublicationCategory;

/// JSON error body with a status code.
struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::EmptyQuery | Error::InvalidInput(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError(status, e.to_string())
    }
}

fn parse_request(params: &HashMap<String, String>) -> Result<SearchRequest, ApiError> {
    let bad = |msg: String| ApiError(StatusCode::BAD_REQUEST, msg);
    let query = params.get("q").cloned().unwrap_or_default();
    let category = match params.get("tab").map(|t| t.trim()).filter(|t| !t.is_empty()) {
        None => PublicationCategory::Reviews,
        Some(tab) => tab.parse().map_err(|e: Error| bad(e.to_string()))?,
    };
    let page = match params.get("page").map(|p| p.trim()).filter(|p| !p.is_empty()) {
        None => 1,
        Some(p) => p
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| bad(format!("page must be a positive integer, got {p:?}")))?,
    };
    Ok(SearchRequest { query, category, page })
}

async fn search(
    State(engine): State<Arc<SearchEngine>>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let request = parse_request(&params)?;
    let response = tokio::task::spawn_blocking(move || engine.search(&request))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    Ok(Json(response).into_response())
}

async fn health(State(engine): State<Arc<SearchEngine>>) -> Response {
    let snapshot = engine.snapshot();
    Json(json!({
        "status": "ok",
        "index_version": snapshot.version(),
        "doc_count": snapshot.document_count(),
    }))
    .into_response()
}

async fn not_found() -> ApiError {
    ApiError(StatusCode::NOT_FOUND, "no such endpoint".into())
}

/// `GET /api/search` and `GET /api/health`.
pub fn router(engine: Arc<SearchEngine>) -> Router {
    Router::new()
        .route("/api/search", get(search))
        .route("/api/health", get(health))
        .fallback(not_found)
        .with_state(engine)
}

/// Serves until Ctrl-C.
pub async fn serve(engine: Arc<SearchEngine>, addr: SocketAddr) -> Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router(engine))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}

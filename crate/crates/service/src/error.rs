use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use serde_json::json;

use knotmorph_core::{Error, ValidationVerdict};

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ValidationVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub current_revision: Option<u64>,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            verdict: None,
            current_revision: None,
        }
    }

    pub fn not_found(what: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", what)
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    pub fn conflict(current: u64, message: impl Into<String>) -> Self {
        Self {
            current_revision: Some(current),
            ..Self::new(StatusCode::CONFLICT, "stale_revision", message)
        }
    }

    pub fn invalid(verdict: ValidationVerdict) -> Self {
        Self {
            verdict: Some(verdict.clone()),
            ..Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_geometry", verdict.to_string())
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::Validation(v) => ApiError::invalid(v),
            Error::Parse { .. } => Self::new(StatusCode::BAD_REQUEST, "parse_error", e.to_string()),
            Error::Domain(_) | Error::DegenerateProjection { .. } => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, "domain_error", e.to_string())
            }
            Error::Cancelled => Self::new(StatusCode::CONFLICT, "cancelled", e.to_string()),
            Error::Io(_) | Error::Json(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self }))).into_response()
    }
}

pub type ApiResult<T> = Result<T, ApiError>;

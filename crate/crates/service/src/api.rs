use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use hornex_core::LearnerConfig;
use serde::de::DeserializeOwned;

use crate::session::{
    Answering, ExpertAnswer, Session, SessionError, SessionSpec, SessionState, Verdict,
};
use crate::wire::{
    AbortRequest, AnswerRequest, AnswerResponse, CreateSession, ErrorBody, QueryResponse,
    ReportResponse, SessionView,
};
use crate::{AppState, Slot};

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(show))
        .route("/sessions/{id}/query", get(query))
        .route("/sessions/{id}/answer", post(answer))
        .route("/sessions/{id}/hypothesis", get(hypothesis))
        .route("/sessions/{id}/report", get(report))
        .route("/sessions/{id}/abort", post(abort))
        .with_state(state)
}

#[derive(Debug)]
struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
        }
    }

    fn unknown(id: &str) -> Self {
        Self::new(
            StatusCode::NOT_FOUND,
            "unknown_session",
            format!("no session {id:?}"),
        )
    }

    fn busy() -> Self {
        Self::new(
            StatusCode::CONFLICT,
            "wrong_state",
            "session is processing another request",
        )
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let (status, code) = match &e {
            SessionError::InvalidConfig(_) => (StatusCode::BAD_REQUEST, "invalid_config"),
            SessionError::ValidationFailed(_) => (StatusCode::BAD_REQUEST, "validation_failed"),
            SessionError::WrongState(_) => (StatusCode::CONFLICT, "wrong_state"),
            SessionError::Replay(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.code.to_string(),
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

/// Parses a JSON body, reporting every failure as 400. An empty body reads
/// as `{}` where `T` allows it.
fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let bytes: &[u8] = if body.iter().all(u8::is_ascii_whitespace) {
        b"{}"
    } else {
        body
    };
    serde_json::from_slice(bytes)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.to_string()))
}

fn lookup(state: &AppState, id: &str) -> Result<Arc<Slot>, ApiError> {
    state.slot(id).ok_or_else(|| ApiError::unknown(id))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
}

fn new_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

fn resolve(
    state: &AppState,
    req: CreateSession,
) -> Result<(SessionSpec, Option<crate::Dataset>), ApiError> {
    let invalid = |m: String| ApiError::new(StatusCode::BAD_REQUEST, "invalid_config", m);
    let dataset = match &req.dataset {
        Some(name) => Some(state.datasets.get(name).cloned().ok_or_else(|| {
            invalid(format!(
                "unknown dataset {name:?}; loaded: {:?}",
                state.dataset_names()
            ))
        })?),
        None => None,
    };
    let attributes = match (&dataset, req.attributes) {
        (Some(d), None) => d.attributes.clone(),
        (Some(d), Some(a)) if a == d.attributes => a,
        (Some(_), Some(_)) => return Err(invalid("attributes differ from the dataset's".into())),
        (None, Some(a)) => a,
        (None, None) => return Err(invalid("either attributes or dataset is required".into())),
    };
    let answering = req.answering.unwrap_or(if dataset.is_some() {
        Answering::Auto
    } else {
        Answering::Manual
    });
    let cache = req.cache.unwrap_or(answering != Answering::Auto);
    let config = LearnerConfig {
        epsilon: req.epsilon,
        delta: req.delta,
        mode: req.mode,
        cache_counterexamples: cache,
        cache_confirmed: cache,
        valid_hypothesis: req.valid_hypothesis,
        seed: req.seed,
        max_counterexamples: req.max_counterexamples,
    };
    let spec = SessionSpec {
        config,
        attributes,
        dataset: req.dataset,
        answering,
    };
    Ok((spec, dataset))
}

async fn create(State(state): State<Shared>, body: Bytes) -> ApiResult<SessionView> {
    let req: CreateSession = parse(&body)?;
    let (spec, dataset) = resolve(&state, req)?;
    let state2 = state.clone();
    let view = blocking(move || {
        let mut session = Session::create(new_id(), spec, dataset.map(|d| d.family))?;
        state2.persist(&mut session);
        let slot = state2.insert(session);
        let view = slot.snapshot().session.clone();
        Ok(view)
    })
    .await?;
    Ok(Json(view))
}

async fn show(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<SessionView> {
    Ok(Json(lookup(&state, &id)?.snapshot().session.clone()))
}

async fn query(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<QueryResponse> {
    let snap = lookup(&state, &id)?.snapshot();
    let stopped = matches!(
        snap.session.state,
        SessionState::Finished | SessionState::Aborted { .. }
    );
    Ok(Json(QueryResponse {
        state: snap.session.state.clone(),
        query: snap.session.query.clone(),
        formula: stopped.then(|| snap.hypothesis.implications.clone()),
    }))
}

async fn hypothesis(
    State(state): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<crate::wire::HypothesisView> {
    Ok(Json(lookup(&state, &id)?.snapshot().hypothesis.clone()))
}

async fn answer(
    State(state): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<AnswerResponse> {
    let slot = lookup(&state, &id)?;
    let req: AnswerRequest = parse(&body)?;
    let answer = match req.answer {
        Verdict::Accept if req.counterexample.is_some() => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "validation_failed",
                "an accepted implication takes no counterexample",
            ))
        }
        Verdict::Accept => ExpertAnswer::Accept,
        Verdict::Reject => ExpertAnswer::Reject(req.counterexample),
    };
    let state2 = state.clone();
    blocking(move || {
        let mut session = slot.engine.try_lock().map_err(|_| ApiError::busy())?;
        let before = slot.snapshot();
        slot.mark_running();
        let outcome = session.answer(req.query_id, answer);
        state2.persist(&mut session);
        match outcome {
            Ok(()) => {
                slot.publish(&session);
                let snap = slot.snapshot();
                Ok(AnswerResponse {
                    session: snap.session.clone(),
                    hypothesis: snap.hypothesis.clone(),
                })
            }
            Err(e) => {
                // a rejected answer leaves the session as it was
                *slot.snapshot.write().expect("snapshot lock") = before;
                Err(e.into())
            }
        }
    })
    .await
    .map(Json)
}

async fn report(State(state): State<Shared>, Path(id): Path<String>) -> ApiResult<ReportResponse> {
    let slot = lookup(&state, &id)?;
    blocking(move || {
        let session = slot.engine.lock().expect("session lock");
        Ok(ReportResponse {
            state: session.state(),
            report: session.run_report(),
            by_source: session.source_counts(),
            log: session.log().to_vec(),
        })
    })
    .await
    .map(Json)
}

async fn abort(
    State(state): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<SessionView> {
    let slot = lookup(&state, &id)?;
    let req: AbortRequest = parse(&body)?;
    let mut session = slot.engine.try_lock().map_err(|_| ApiError::busy())?;
    session.abort(req.reason.unwrap_or_else(|| "aborted by the expert".into()))?;
    state.persist(&mut session);
    slot.publish(&session);
    Ok(Json(slot.snapshot().session.clone()))
}

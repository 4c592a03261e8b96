//! Request and response bodies. Field names are fixed by `docs/protocol.md`.

use hornex_core::io::{render_implication, Conclusion, ImplicationRecord};
use hornex_core::learner::{Mode, Progress, Query, QueryKind, QueryOrigin, RunReport};
use hornex_core::ClosureResult;
use serde::{Deserialize, Serialize};

use crate::session::{Answering, LogEntry, Session, SessionState, SourceCounts, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub epsilon: f64,
    pub delta: f64,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    /// Counterexample and confirmed-implication caching. Defaults to on
    /// whenever a human answers anything.
    #[serde(default)]
    pub cache: Option<bool>,
    #[serde(default)]
    pub valid_hypothesis: bool,
    #[serde(default)]
    pub max_counterexamples: Option<u64>,
    #[serde(default)]
    pub attributes: Option<Vec<String>>,
    #[serde(default)]
    pub dataset: Option<String>,
    /// Defaults to `auto` with a dataset and `manual` without.
    #[serde(default)]
    pub answering: Option<Answering>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRequest {
    pub query_id: u64,
    pub answer: Verdict,
    #[serde(default)]
    pub counterexample: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbortRequest {
    #[serde(default)]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryView {
    pub id: u64,
    pub kind: QueryKind,
    pub origin: QueryOrigin,
    pub premise: Vec<String>,
    pub conclusion: Conclusion,
    /// Conclusion minus premise; `null` when the conclusion is bottom.
    pub added: Option<Vec<String>>,
    pub text: String,
}

impl QueryView {
    pub fn of(query: &Query, session: &Session) -> Self {
        let universe = session.universe();
        let record = ImplicationRecord::from_implication(&query.implication, universe);
        let added = match &query.implication.conclusion {
            ClosureResult::Closed(c) => Some(
                universe
                    .labels_of(&c.difference(&query.implication.premise))
                    .map(str::to_string)
                    .collect(),
            ),
            ClosureResult::Bottom => None,
        };
        Self {
            id: query.id,
            kind: query.kind,
            origin: query.origin,
            premise: record.premise,
            conclusion: record.conclusion,
            added,
            text: render_implication(&query.implication, universe),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisView {
    pub size: usize,
    pub implications: Vec<ImplicationRecord>,
    pub rendered: Vec<String>,
    /// Positions changed by the latest refinement.
    pub last_changed: Vec<usize>,
}

impl HypothesisView {
    pub fn of(session: &Session) -> Self {
        let h = session.learner().hypothesis();
        let universe = session.universe();
        Self {
            size: h.len(),
            implications: h
                .iter()
                .map(|imp| ImplicationRecord::from_implication(imp, universe))
                .collect(),
            rendered: h
                .iter()
                .map(|imp| render_implication(imp, universe))
                .collect(),
            last_changed: session.learner().last_changed().to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    #[serde(flatten)]
    pub state: SessionState,
    pub answering: Answering,
    pub dataset: Option<String>,
    pub attributes: Vec<String>,
    pub query: Option<QueryView>,
    pub progress: Progress,
    pub hypothesis_size: usize,
    pub counterexamples: u64,
    pub answered: usize,
}

impl SessionView {
    pub fn of(session: &Session) -> Self {
        Self {
            id: session.id().to_string(),
            state: session.state(),
            answering: session.spec().answering,
            dataset: session.spec().dataset.clone(),
            attributes: session.spec().attributes.clone(),
            query: session.pending_query().map(|q| QueryView::of(q, session)),
            progress: session.learner().progress(),
            hypothesis_size: session.learner().hypothesis().len(),
            counterexamples: session.learner().counterexamples(),
            answered: session.log().len(),
        }
    }
}

/// `GET /sessions/{id}/query`: the pending query, or the final formula once
/// the session has stopped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResponse {
    #[serde(flatten)]
    pub state: SessionState,
    pub query: Option<QueryView>,
    pub formula: Option<Vec<ImplicationRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerResponse {
    pub session: SessionView,
    pub hypothesis: HypothesisView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportResponse {
    #[serde(flatten)]
    pub state: SessionState,
    pub report: RunReport,
    pub by_source: SourceCounts,
    pub log: Vec<LogEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

//! One learning session: a [`PacLearner`] whose queries are answered by a
//! cache, an attached dataset or a human, with an append-only answer log.

use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use hornex_core::io::{Conclusion, ImplicationRecord};
use hornex_core::learner::{Query, QueryKind, QueryOrigin, Reply, Termination};
use hornex_core::{
    AnswerCache, AssignmentFamily, AttributeSet, AttributeUniverse, DatasetOracle,
    ImplicationOracle, LearnerConfig, LearnerError, OracleAnswer, PacLearner, RunReport,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("validation failed: {0}")]
    ValidationFailed(String),
    #[error("wrong state: {0}")]
    WrongState(String),
    #[error("log does not replay: {0}")]
    Replay(String),
}

/// Which queries an attached dataset answers on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Answering {
    /// Every query; the human only watches.
    Auto,
    /// Restricted queries; full queries go to the human.
    Hybrid,
    /// None.
    Manual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    Human,
    Cache,
    Dataset,
}

/// Everything needed to rebuild a session from scratch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionSpec {
    pub config: LearnerConfig,
    pub attributes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    pub answering: Answering,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accept,
    Reject,
}

/// One answered query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub query_id: u64,
    pub kind: QueryKind,
    /// How the answerer was asked. A restricted query answered from the
    /// dataset is asked as a full one when counterexamples are cached.
    pub asked: QueryKind,
    pub origin: QueryOrigin,
    pub premise: Vec<String>,
    pub conclusion: Conclusion,
    pub answer: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<String>>,
    pub source: Source,
    pub timestamp_ms: u64,
}

/// A persisted transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum Event {
    Created { id: String, spec: SessionSpec },
    Answered(LogEntry),
    Aborted { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum SessionState {
    Created,
    AwaitingAnswer,
    Running,
    Finished,
    Aborted { reason: String },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCounts {
    pub human: u64,
    pub cache: u64,
    pub dataset: u64,
}

/// An answer from the expert, with the counterexample as attribute labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExpertAnswer {
    Accept,
    Reject(Option<Vec<String>>),
}

fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    spec: SessionSpec,
    universe: AttributeUniverse,
    oracle: Option<DatasetOracle>,
    learner: PacLearner,
    cache: Option<AnswerCache>,
    log: Vec<LogEntry>,
    events: Vec<Event>,
}

impl Session {
    /// Builds the session without answering anything yet.
    fn build(
        id: String,
        spec: SessionSpec,
        data: Option<Arc<AssignmentFamily>>,
    ) -> Result<Self, SessionError> {
        let universe = AttributeUniverse::new(spec.attributes.iter())
            .map_err(|e| SessionError::InvalidConfig(e.to_string()))?;
        if let Some(v) = &data {
            if v.width() != universe.len() {
                return Err(SessionError::InvalidConfig(format!(
                    "dataset has {} attributes, session has {}",
                    v.width(),
                    universe.len()
                )));
            }
        }
        if spec.answering != Answering::Manual && data.is_none() {
            return Err(SessionError::InvalidConfig(
                "automatic answering needs a dataset".into(),
            ));
        }
        let learner = PacLearner::new(universe.len(), spec.config.clone())
            .map_err(|e| SessionError::InvalidConfig(e.to_string()))?;
        let config = &spec.config;
        let cache = (config.cache_counterexamples || config.cache_confirmed).then(|| {
            AnswerCache::new(
                universe.len(),
                config.cache_counterexamples,
                config.cache_confirmed,
            )
        });
        let events = vec![Event::Created {
            id: id.clone(),
            spec: spec.clone(),
        }];
        Ok(Self {
            id,
            universe,
            oracle: data.map(DatasetOracle::new),
            learner,
            cache,
            log: Vec::new(),
            events,
            spec,
        })
    }

    /// Starts a session and answers whatever the cache or dataset can.
    pub fn create(
        id: String,
        spec: SessionSpec,
        data: Option<Arc<AssignmentFamily>>,
    ) -> Result<Self, SessionError> {
        let mut session = Self::build(id, spec, data)?;
        session.pump()?;
        Ok(session)
    }

    /// Rebuilds a session from its persisted events.
    pub fn replay(
        events: &[Event],
        data: Option<Arc<AssignmentFamily>>,
    ) -> Result<Self, SessionError> {
        let (id, spec) = match events.first() {
            Some(Event::Created { id, spec }) => (id.clone(), spec.clone()),
            _ => {
                return Err(SessionError::Replay(
                    "log must start with a creation event".into(),
                ))
            }
        };
        let mut session = Self::build(id, spec, data)?;
        for event in &events[1..] {
            match event {
                Event::Created { .. } => {
                    return Err(SessionError::Replay("second creation event".into()))
                }
                Event::Answered(entry) => session.replay_entry(entry)?,
                Event::Aborted { reason } => session.abort(reason.clone())?,
            }
        }
        // already persisted; only what the pump adds is new
        session.events.clear();
        session.pump()?;
        Ok(session)
    }

    fn replay_entry(&mut self, entry: &LogEntry) -> Result<(), SessionError> {
        let query = self.learner.pending_query().ok_or_else(|| {
            SessionError::Replay(format!(
                "answer to query {} after the run ended",
                entry.query_id
            ))
        })?;
        let record = ImplicationRecord::from_implication(&query.implication, &self.universe);
        if query.id != entry.query_id
            || record.premise != entry.premise
            || record.conclusion != entry.conclusion
        {
            return Err(SessionError::Replay(format!(
                "logged query {} does not match pending query {}",
                entry.query_id, query.id
            )));
        }
        let reply = self
            .to_reply(entry.answer, entry.counterexample.clone())
            .map_err(|e| SessionError::Replay(e.to_string()))?;
        self.apply_as(reply, entry.source, entry.asked, entry.timestamp_ms)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn spec(&self) -> &SessionSpec {
        &self.spec
    }

    pub fn universe(&self) -> &AttributeUniverse {
        &self.universe
    }

    pub fn learner(&self) -> &PacLearner {
        &self.learner
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    /// Events produced since the last call, for persistence.
    pub fn take_events(&mut self) -> Vec<Event> {
        std::mem::take(&mut self.events)
    }

    pub fn state(&self) -> SessionState {
        match self.learner.termination() {
            Some(Termination::Aborted(reason)) => SessionState::Aborted {
                reason: reason.clone(),
            },
            Some(_) => SessionState::Finished,
            None if self.learner.pending_query().is_some() => SessionState::AwaitingAnswer,
            None => SessionState::Created,
        }
    }

    pub fn pending_query(&self) -> Option<&Query> {
        self.learner.pending_query()
    }

    fn dataset_answers(&self, kind: QueryKind) -> bool {
        match self.spec.answering {
            Answering::Auto => true,
            Answering::Hybrid => kind == QueryKind::Restricted,
            Answering::Manual => false,
        }
    }

    /// Answers pending queries from the cache and the dataset until one
    /// needs the human or the run ends.
    fn pump(&mut self) -> Result<(), SessionError> {
        while let Some(query) = self.learner.pending_query() {
            let imp = query.implication.clone();
            let kind = query.kind;
            if let Some(hit) = self.cache.as_ref().and_then(|c| c.lookup(&imp)) {
                self.apply(hit.into(), Source::Cache, now_ms())?;
                continue;
            }
            if !self.dataset_answers(kind) {
                break;
            }
            let full = kind == QueryKind::Full
                || self
                    .cache
                    .as_ref()
                    .is_some_and(AnswerCache::caches_counterexamples);
            let oracle = self
                .oracle
                .as_mut()
                .expect("automatic answering has a dataset");
            let reply = if full {
                oracle
                    .ask(&imp)
                    .map_err(|e| SessionError::Replay(e.to_string()))?
                    .into()
            } else if oracle
                .ask_restricted(&imp)
                .map_err(|e| SessionError::Replay(e.to_string()))?
            {
                Reply::Valid
            } else {
                Reply::Invalid
            };
            let asked = if full {
                QueryKind::Full
            } else {
                QueryKind::Restricted
            };
            self.apply_as(reply, Source::Dataset, asked, now_ms())?;
        }
        Ok(())
    }

    fn apply(
        &mut self,
        reply: Reply,
        source: Source,
        timestamp_ms: u64,
    ) -> Result<(), SessionError> {
        let kind = self
            .learner
            .pending_query()
            .map_or(QueryKind::Restricted, |q| q.kind);
        self.apply_as(reply, source, kind, timestamp_ms)
    }

    fn apply_as(
        &mut self,
        reply: Reply,
        source: Source,
        asked: QueryKind,
        timestamp_ms: u64,
    ) -> Result<(), SessionError> {
        self.learner.check_reply(&reply).map_err(validation)?;
        let query = self.learner.pending_query().expect("checked above").clone();
        if let Some(cache) = &mut self.cache {
            match &reply {
                Reply::Valid => cache.record(&query.implication, &OracleAnswer::Valid),
                Reply::Counterexample(c) => {
                    cache.record(&query.implication, &OracleAnswer::Counterexample(c.clone()))
                }
                Reply::Invalid => {}
            }
        }
        let record = ImplicationRecord::from_implication(&query.implication, &self.universe);
        let entry = LogEntry {
            query_id: query.id,
            kind: query.kind,
            asked,
            origin: query.origin,
            premise: record.premise,
            conclusion: record.conclusion,
            answer: if reply == Reply::Valid {
                Verdict::Accept
            } else {
                Verdict::Reject
            },
            counterexample: match &reply {
                Reply::Counterexample(c) => Some(self.labels(c)),
                _ => None,
            },
            source,
            timestamp_ms,
        };
        self.learner.feed(reply).map_err(validation)?;
        self.events.push(Event::Answered(entry.clone()));
        self.log.push(entry);
        Ok(())
    }

    fn labels(&self, set: &AttributeSet) -> Vec<String> {
        self.universe.labels_of(set).map(str::to_string).collect()
    }

    fn to_reply(
        &self,
        verdict: Verdict,
        counterexample: Option<Vec<String>>,
    ) -> Result<Reply, SessionError> {
        Ok(match (verdict, counterexample) {
            (Verdict::Accept, None) => Reply::Valid,
            (Verdict::Accept, Some(_)) => {
                return Err(SessionError::ValidationFailed(
                    "an accepted implication has no counterexample".into(),
                ))
            }
            (Verdict::Reject, None) => Reply::Invalid,
            (Verdict::Reject, Some(labels)) => {
                let set = self
                    .universe
                    .set_from_labels(labels.iter())
                    .map_err(|e| SessionError::ValidationFailed(e.to_string()))?;
                Reply::Counterexample(set)
            }
        })
    }

    /// Applies a human answer to query `query_id`, then continues
    /// automatically as far as possible.
    pub fn answer(&mut self, query_id: u64, answer: ExpertAnswer) -> Result<(), SessionError> {
        let pending = match (self.state(), self.learner.pending_query()) {
            (SessionState::AwaitingAnswer, Some(q)) => q.id,
            (state, _) => {
                return Err(SessionError::WrongState(format!(
                    "session is {}",
                    state_name(&state)
                )))
            }
        };
        if pending != query_id {
            return Err(SessionError::WrongState(format!(
                "query {query_id} is not pending; the pending query is {pending}"
            )));
        }
        let reply = match answer {
            ExpertAnswer::Accept => self.to_reply(Verdict::Accept, None)?,
            ExpertAnswer::Reject(labels) => self.to_reply(Verdict::Reject, labels)?,
        };
        self.apply(reply, Source::Human, now_ms())?;
        self.pump()
    }

    pub fn abort(&mut self, reason: String) -> Result<(), SessionError> {
        match self.state() {
            SessionState::Finished | SessionState::Aborted { .. } => Err(SessionError::WrongState(
                "session has already stopped".into(),
            )),
            _ => {
                self.learner.abort(reason.clone());
                self.events.push(Event::Aborted { reason });
                Ok(())
            }
        }
    }

    pub fn source_counts(&self) -> SourceCounts {
        let mut counts = SourceCounts::default();
        for entry in &self.log {
            match entry.source {
                Source::Human => counts.human += 1,
                Source::Cache => counts.cache += 1,
                Source::Dataset => counts.dataset += 1,
            }
        }
        counts
    }

    /// The learner's report with query counts taken from the log: queries
    /// answered by the cache count as cache hits, the rest as oracle queries.
    pub fn run_report(&self) -> RunReport {
        let mut report = self.learner.report();
        report.oracle_queries = Default::default();
        for entry in self.log.iter().filter(|e| e.source != Source::Cache) {
            match entry.asked {
                QueryKind::Restricted => report.oracle_queries.restricted += 1,
                QueryKind::Full => report.oracle_queries.full += 1,
            }
        }
        report.cache_hits = self.source_counts().cache;
        report
    }
}

fn validation(e: LearnerError) -> SessionError {
    match e {
        LearnerError::NoPendingQuery => SessionError::WrongState(e.to_string()),
        _ => SessionError::ValidationFailed(e.to_string()),
    }
}

pub fn state_name(state: &SessionState) -> &'static str {
    match state {
        SessionState::Created => "created",
        SessionState::AwaitingAnswer => "awaiting-answer",
        SessionState::Running => "running",
        SessionState::Finished => "finished",
        SessionState::Aborted { .. } => "aborted",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hornex_core::{pac_horn_approximation, Implication};

    fn spec(attrs: &[&str], answering: Answering, config: LearnerConfig) -> SessionSpec {
        SessionSpec {
            config,
            attributes: attrs.iter().map(|s| s.to_string()).collect(),
            dataset: None,
            answering,
        }
    }

    fn family() -> Arc<AssignmentFamily> {
        Arc::new(AssignmentFamily::from_bits(3, &[0b011, 0b110, 0b001]))
    }

    #[test]
    fn auto_session_matches_direct_run() {
        for cache in [false, true] {
            let mut config = LearnerConfig::new(0.1, 0.1).with_seed(3);
            config.cache_counterexamples = cache;
            config.cache_confirmed = cache;
            let s = Session::create(
                "s".into(),
                spec(&["a", "b", "c"], Answering::Auto, config.clone()),
                Some(family()),
            )
            .unwrap();
            assert_eq!(s.state(), SessionState::Finished);
            let (h, report) =
                pac_horn_approximation(&mut DatasetOracle::new(family()), &config).unwrap();
            assert_eq!(s.learner().hypothesis(), &h);
            let ours = s.run_report();
            assert_eq!(ours.oracle_queries, report.oracle_queries);
            assert_eq!(ours.cache_hits, report.cache_hits);
            assert_eq!(s.log().len() as u64, ours.queries.total());
        }
    }

    #[test]
    fn accept_on_bottom_query_means_not_a_member() {
        // the first membership probe asks X → ⊥; accepting it says X is no model
        let config = LearnerConfig::new(0.5, 0.5).with_seed(0);
        let mut s = Session::create(
            "s".into(),
            spec(&["a", "b"], Answering::Manual, config),
            None,
        )
        .unwrap();
        let q = s.pending_query().unwrap().clone();
        assert!(q.implication.conclusion.is_bottom());
        assert_eq!(q.origin, QueryOrigin::Membership);
        let x = q.implication.premise.clone();
        s.answer(q.id, ExpertAnswer::Accept).unwrap();
        // ∅ is a model of the empty hypothesis, so the sample is a counterexample
        // and the learner adds X → ⊥
        assert_eq!(
            s.learner().hypothesis().as_slice(),
            &[Implication::to_bottom(x)]
        );
    }

    #[test]
    fn rejects_bad_answers_without_changing_state() {
        let config = LearnerConfig::new(0.5, 0.5).with_seed(1);
        let mut s = Session::create(
            "s".into(),
            spec(&["a", "b"], Answering::Manual, config),
            None,
        )
        .unwrap();
        let q = s.pending_query().unwrap().clone();
        let before = s.log().len();
        assert!(matches!(
            s.answer(q.id + 1, ExpertAnswer::Accept),
            Err(SessionError::WrongState(_))
        ));
        assert!(matches!(
            s.answer(q.id, ExpertAnswer::Reject(Some(vec!["zzz".into()]))),
            Err(SessionError::ValidationFailed(_))
        ));
        // the premise of the first query is the random sample; the empty set
        // fails to contain it unless the sample is empty
        if !q.implication.premise.is_empty() {
            assert!(matches!(
                s.answer(q.id, ExpertAnswer::Reject(Some(vec![]))),
                Err(SessionError::ValidationFailed(_))
            ));
        }
        assert_eq!(s.pending_query(), Some(&q));
        assert_eq!(s.log().len(), before);
    }

    #[test]
    fn abort_keeps_partial_hypothesis() {
        let config = LearnerConfig::new(0.5, 0.5).with_seed(1);
        let mut s = Session::create(
            "s".into(),
            spec(&["a", "b"], Answering::Manual, config),
            None,
        )
        .unwrap();
        let q = s.pending_query().unwrap().clone();
        s.answer(q.id, ExpertAnswer::Accept).unwrap();
        let h = s.learner().hypothesis().clone();
        s.abort("done for today".into()).unwrap();
        assert_eq!(
            s.state(),
            SessionState::Aborted {
                reason: "done for today".into()
            }
        );
        assert!(!s.run_report().terminated);
        assert_eq!(s.learner().hypothesis(), &h);
        assert!(s.abort("again".into()).is_err());
        assert!(matches!(
            s.answer(q.id + 1, ExpertAnswer::Accept),
            Err(SessionError::WrongState(_))
        ));
    }

    #[test]
    fn replay_reproduces_session() {
        let mut config = LearnerConfig::new(0.2, 0.2).with_seed(9);
        config.cache_counterexamples = true;
        let mut s = Session::create(
            "s".into(),
            spec(&["a", "b", "c"], Answering::Hybrid, config),
            Some(family()),
        )
        .unwrap();
        let mut events = s.take_events();
        let mut o = DatasetOracle::new(family());
        while let Some(q) = s.pending_query().cloned() {
            let answer = match o.ask(&q.implication).unwrap() {
                OracleAnswer::Valid => ExpertAnswer::Accept,
                OracleAnswer::Counterexample(c) => ExpertAnswer::Reject(Some(
                    s.universe().labels_of(&c).map(str::to_string).collect(),
                )),
            };
            s.answer(q.id, answer).unwrap();
            events.extend(s.take_events());
        }
        let r = Session::replay(&events, Some(family())).unwrap();
        assert_eq!(r.learner().hypothesis(), s.learner().hypothesis());
        assert_eq!(r.log(), s.log());
        assert_eq!(r.state(), SessionState::Finished);

        let mut broken = events.clone();
        if let Some(Event::Answered(e)) = broken.get_mut(1) {
            e.query_id += 100;
        }
        assert!(Session::replay(&broken, Some(family())).is_err());
    }

    #[test]
    fn automatic_answering_needs_data() {
        let config = LearnerConfig::new(0.5, 0.5);
        assert!(Session::create(
            "s".into(),
            spec(&["a"], Answering::Auto, config.clone()),
            None
        )
        .is_err());
        assert!(Session::create(
            "s".into(),
            spec(&["a", "a"], Answering::Manual, config),
            None
        )
        .is_err());
        let bad = LearnerConfig::new(0.0, 0.5);
        assert!(matches!(
            Session::create("s".into(), spec(&["a"], Answering::Manual, bad), None),
            Err(SessionError::InvalidConfig(_))
        ));
    }
}

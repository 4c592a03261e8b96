//! HTTP front end for interactive learning sessions.
//!
//! Each session owns a [`hornex_core::PacLearner`] that stops at every oracle
//! call. Pending queries are served one at a time, answered over HTTP, and
//! the learner resumes until it needs the next answer. The wire format is
//! described in `docs/protocol.md`.

mod api;
pub mod session;
pub mod store;
pub mod wire;

use std::collections::HashMap;
use std::io;
use std::sync::{Arc, Mutex, RwLock};

use hornex_core::io::ContextDocument;
use hornex_core::AssignmentFamily;
use tokio::net::TcpListener;

pub use api::router;
pub use session::{
    Answering, Event, ExpertAnswer, LogEntry, Session, SessionError, SessionSpec, SessionState,
    Source,
};
pub use store::Store;

use wire::{HypothesisView, SessionView};

/// A dataset the server can attach to sessions.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub attributes: Vec<String>,
    pub family: Arc<AssignmentFamily>,
}

impl From<ContextDocument> for Dataset {
    fn from(doc: ContextDocument) -> Self {
        Self {
            attributes: doc.universe.names().to_vec(),
            family: Arc::new(doc.family),
        }
    }
}

/// Read side of a session, rebuilt after every transition.
#[derive(Debug, Clone)]
pub(crate) struct Snapshot {
    pub session: SessionView,
    pub hypothesis: HypothesisView,
}

impl Snapshot {
    fn of(session: &Session) -> Self {
        Self {
            session: SessionView::of(session),
            hypothesis: HypothesisView::of(session),
        }
    }
}

pub(crate) struct Slot {
    engine: Mutex<Session>,
    snapshot: RwLock<Arc<Snapshot>>,
}

impl Slot {
    fn new(session: Session) -> Self {
        let snapshot = RwLock::new(Arc::new(Snapshot::of(&session)));
        Self {
            engine: Mutex::new(session),
            snapshot,
        }
    }

    pub(crate) fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.read().expect("snapshot lock").clone()
    }

    fn publish(&self, session: &Session) {
        *self.snapshot.write().expect("snapshot lock") = Arc::new(Snapshot::of(session));
    }

    fn mark_running(&self) {
        let mut current = (*self.snapshot()).clone();
        current.session.state = SessionState::Running;
        *self.snapshot.write().expect("snapshot lock") = Arc::new(current);
    }
}

pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Slot>>>,
    datasets: HashMap<String, Dataset>,
    store: Option<Store>,
}

impl AppState {
    pub fn new(datasets: HashMap<String, Dataset>, store: Option<Store>) -> Self {
        Self {
            sessions: RwLock::new(HashMap::new()),
            datasets,
            store,
        }
    }

    pub fn dataset_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.datasets.keys().map(String::as_str).collect();
        names.sort_unstable();
        names
    }

    /// Rebuilds every session found in the store. Returns how many.
    pub fn restore(&self) -> Result<usize, SessionError> {
        let Some(store) = &self.store else {
            return Ok(0);
        };
        let logs = store
            .load_all()
            .map_err(|e| SessionError::Replay(format!("{}: {e}", store.dir().display())))?;
        let mut restored = 0;
        for (path, events) in logs {
            let data = match events.first() {
                Some(Event::Created { spec, .. }) => match &spec.dataset {
                    Some(name) => Some(
                        self.datasets
                            .get(name)
                            .ok_or_else(|| {
                                SessionError::Replay(format!(
                                    "{}: dataset {name:?} is not loaded",
                                    path.display()
                                ))
                            })?
                            .family
                            .clone(),
                    ),
                    None => None,
                },
                _ => None,
            };
            let mut session = Session::replay(&events, data)
                .map_err(|e| SessionError::Replay(format!("{}: {e}", path.display())))?;
            self.persist(&mut session);
            self.insert(session);
            restored += 1;
        }
        Ok(restored)
    }

    fn insert(&self, session: Session) -> Arc<Slot> {
        let id = session.id().to_string();
        let slot = Arc::new(Slot::new(session));
        self.sessions
            .write()
            .expect("session map lock")
            .insert(id, slot.clone());
        slot
    }

    pub(crate) fn slot(&self, id: &str) -> Option<Arc<Slot>> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
    }

    fn persist(&self, session: &mut Session) {
        let events = session.take_events();
        if let Some(store) = &self.store {
            if let Err(e) = store.append(session.id(), &events) {
                tracing::error!(session = session.id(), "could not persist session log: {e}");
            }
        }
    }
}

/// Serves until Ctrl-C.
pub async fn serve(listener: TcpListener, state: Arc<AppState>) -> io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

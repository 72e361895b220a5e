use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use serde::Serialize;

use knotmorph_core::io::SessionDocument;
use knotmorph_core::morph::ScanControl;

use crate::error::{ApiError, ApiResult};
use crate::payload::TransitionPayload;

/// A committed document and the revision it was committed at.
#[derive(Debug)]
pub struct Snapshot {
    pub revision: u64,
    pub doc: SessionDocument,
}

#[derive(Debug)]
pub struct Session {
    current: RwLock<Arc<Snapshot>>,
    /// Serializes compare-and-set commits; readers never take it.
    commit: Mutex<()>,
}

impl Session {
    fn new(doc: SessionDocument) -> Self {
        Self {
            current: RwLock::new(Arc::new(Snapshot { revision: 1, doc })),
            commit: Mutex::new(()),
        }
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("session lock").clone()
    }

    /// Applies `edit` to a copy of the document if `base_revision` is still
    /// current, and commits it as the next revision.
    pub fn commit<F>(&self, base_revision: u64, edit: F) -> ApiResult<Arc<Snapshot>>
    where
        F: FnOnce(&mut SessionDocument) -> ApiResult<()>,
    {
        let _guard = self.commit.lock().expect("commit lock");
        let now = self.snapshot();
        if now.revision != base_revision {
            return Err(ApiError::conflict(
                now.revision,
                format!("base revision {base_revision} is stale; current is {}", now.revision),
            ));
        }
        let mut doc = now.doc.clone();
        edit(&mut doc)?;
        let next = Arc::new(Snapshot {
            revision: now.revision + 1,
            doc,
        });
        *self.current.write().expect("session lock") = next.clone();
        Ok(next)
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum JobState {
    Running,
    Done {
        result: Box<TransitionPayload>,
        /// Whether the result was appended to the session document.
        recorded: bool,
    },
    Failed {
        message: String,
    },
    Cancelled,
}

#[derive(Debug)]
pub struct Job {
    pub session: u64,
    pub morph: String,
    pub revision: u64,
    pub control: ScanControl,
    pub state: Mutex<JobState>,
}

#[derive(Debug, Default)]
pub struct AppState {
    sessions: RwLock<HashMap<u64, Arc<Session>>>,
    jobs: RwLock<HashMap<u64, Arc<Job>>>,
    next_session: AtomicU64,
    next_job: AtomicU64,
}

impl AppState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn create_session(&self, doc: SessionDocument) -> (u64, Arc<Snapshot>) {
        let id = self.next_session.fetch_add(1, Ordering::SeqCst) + 1;
        let session = Arc::new(Session::new(doc));
        let snap = session.snapshot();
        self.sessions.write().expect("sessions lock").insert(id, session);
        (id, snap)
    }

    pub fn session(&self, id: u64) -> ApiResult<Arc<Session>> {
        self.sessions
            .read()
            .expect("sessions lock")
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no session {id}")))
    }

    pub fn add_job(&self, job: Job) -> (u64, Arc<Job>) {
        let id = self.next_job.fetch_add(1, Ordering::SeqCst) + 1;
        let job = Arc::new(job);
        self.jobs.write().expect("jobs lock").insert(id, job.clone());
        (id, job)
    }

    pub fn job(&self, id: u64) -> ApiResult<Arc<Job>> {
        self.jobs
            .read()
            .expect("jobs lock")
            .get(&id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("no job {id}")))
    }
}

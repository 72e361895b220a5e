use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use knotmorph_core::corpus;
use knotmorph_core::io::session::{
    CurveSource, KnotEntry, MorphDefinition, ResolutionSettings, ResultEntry, Tolerances,
};
use knotmorph_core::io::{parse_stick_knot, SessionDocument};
use knotmorph_core::morph::{first_intersection_parameter_with, ScanControl, MIN_GRID};
use knotmorph_core::{Error, Point3};

use crate::error::{ApiError, ApiResult};
use crate::payload::{curve_payload, mesh_payload, transition_payload, CurvePayload, MeshPayload};
use crate::state::{AppState, Job, JobState, Snapshot};
use crate::API_VERSION;

type Shared = State<Arc<AppState>>;

pub fn routes(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/schema", get(schema))
        .route("/api/v1/sessions", post(create_session))
        .route("/api/v1/sessions/{id}", get(get_session))
        .route("/api/v1/sessions/{id}/document", get(download_document))
        .route("/api/v1/sessions/{id}/settings", put(set_settings))
        .route("/api/v1/sessions/{id}/knots/{knot}/points", get(get_points).put(set_points))
        .route("/api/v1/sessions/{id}/knots/{knot}/insert", post(insert_point))
        .route("/api/v1/sessions/{id}/knots/{knot}/refine", post(refine_knot))
        .route("/api/v1/sessions/{id}/morphs/{morph}", put(set_morph))
        .route("/api/v1/sessions/{id}/morphs/{morph}/curve", get(get_curve))
        .route("/api/v1/sessions/{id}/morphs/{morph}/mesh", get(get_mesh))
        .route("/api/v1/sessions/{id}/morphs/{morph}/transition", post(start_transition))
        .route("/api/v1/jobs/{job}", get(job_status).delete(cancel_job))
        .route("/api/v1/jobs/{job}/result", get(job_result))
        .with_state(state)
}

async fn schema() -> Json<Value> {
    Json(json!({
        "api_version": API_VERSION,
        "session_format_version": knotmorph_core::io::SESSION_FORMAT_VERSION,
        "conventions": {
            "revisions": "every mutation carries base_revision; a stale value gives 409 with current_revision",
            "errors": "{\"error\": {code, message, verdict?, current_revision?}}",
            "meshes": "positions and witness segments are flat xyz arrays; indices are flat triangle triples; uv is flat per vertex",
        },
        "endpoints": [
            {"method": "POST", "path": "/api/v1/sessions", "body": "{corpus?: [name], knot_files?: [text], document?: SessionDocument, preset?: \"unknot_to_4_1\"}", "returns": "201 SessionView"},
            {"method": "GET", "path": "/api/v1/sessions/{id}", "returns": "SessionView {id, revision, document}"},
            {"method": "GET", "path": "/api/v1/sessions/{id}/document", "returns": "SessionDocument"},
            {"method": "PUT", "path": "/api/v1/sessions/{id}/settings", "body": "{base_revision, resolution?, tolerances?}", "returns": "RevisionView"},
            {"method": "GET", "path": "/api/v1/sessions/{id}/knots/{knot}/points", "returns": "KnotView"},
            {"method": "PUT", "path": "/api/v1/sessions/{id}/knots/{knot}/points", "body": "{base_revision, points: [[x,y,z]]}", "returns": "KnotView; 422 with verdict"},
            {"method": "POST", "path": "/api/v1/sessions/{id}/knots/{knot}/insert", "body": "{base_revision, segment, fraction}", "returns": "KnotView"},
            {"method": "POST", "path": "/api/v1/sessions/{id}/knots/{knot}/refine", "body": "{base_revision, iterations?}", "returns": "KnotView"},
            {"method": "PUT", "path": "/api/v1/sessions/{id}/morphs/{morph}", "body": "{base_revision, fixed, start, end}", "returns": "RevisionView"},
            {"method": "GET", "path": "/api/v1/sessions/{id}/morphs/{morph}/curve", "query": "s, samples?", "returns": "{revision, curve: CurvePayload}"},
            {"method": "GET", "path": "/api/v1/sessions/{id}/morphs/{morph}/mesh", "query": "s, samples?, v_steps?", "returns": "{revision, mesh: MeshPayload}"},
            {"method": "POST", "path": "/api/v1/sessions/{id}/morphs/{morph}/transition", "body": "{grid?, tol?}", "returns": "202 {job, revision}"},
            {"method": "GET", "path": "/api/v1/jobs/{job}", "returns": "JobView {job, session, morph, revision, evaluations, state}"},
            {"method": "DELETE", "path": "/api/v1/jobs/{job}", "returns": "202 JobView"},
            {"method": "GET", "path": "/api/v1/jobs/{job}/result", "returns": "TransitionPayload; 409 unless done"},
        ],
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SessionView {
    pub id: u64,
    pub revision: u64,
    pub document: SessionDocument,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RevisionView {
    pub revision: u64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct KnotView {
    pub revision: u64,
    pub knot: KnotEntry,
}

#[derive(Debug, Default, Deserialize)]
pub struct CreateSession {
    #[serde(default)]
    pub corpus: Vec<String>,
    #[serde(default)]
    pub knot_files: Vec<String>,
    pub document: Option<SessionDocument>,
    pub preset: Option<String>,
}

fn add_knot(doc: &mut SessionDocument, entry: KnotEntry) -> ApiResult<()> {
    if doc.knot(&entry.name).is_some() {
        return Err(ApiError::bad_request(format!("duplicate knot name {:?}", entry.name)));
    }
    doc.knots.push(entry);
    Ok(())
}

async fn create_session(State(state): Shared, Json(req): Json<CreateSession>) -> ApiResult<(StatusCode, Json<SessionView>)> {
    let mut doc = match req.preset.as_deref() {
        Some("unknot_to_4_1") => corpus::iterate_morph_session(),
        Some(other) => return Err(ApiError::bad_request(format!("unknown preset {other:?}"))),
        None => req.document.clone().unwrap_or_default(),
    };
    if req.preset.is_some() && req.document.is_some() {
        return Err(ApiError::bad_request("give either a preset or a document"));
    }
    for name in &req.corpus {
        let record = corpus::record(name).map_err(|_| ApiError::not_found(format!("no corpus knot {name:?}")))?;
        add_knot(&mut doc, KnotEntry::from_record(&record))?;
    }
    for text in &req.knot_files {
        add_knot(&mut doc, KnotEntry::from_record(&parse_stick_knot(text)?))?;
    }
    if doc.knots.is_empty() {
        return Err(ApiError::bad_request("a session needs at least one knot"));
    }
    for k in &doc.knots {
        let verdict = k.validate();
        if !verdict.passed() {
            return Err(ApiError::invalid(verdict));
        }
    }
    let (id, snap) = state.create_session(doc);
    Ok((StatusCode::CREATED, Json(view(id, &snap))))
}

fn view(id: u64, snap: &Snapshot) -> SessionView {
    SessionView {
        id,
        revision: snap.revision,
        document: snap.doc.clone(),
    }
}

async fn get_session(State(state): Shared, Path(id): Path<u64>) -> ApiResult<Json<SessionView>> {
    Ok(Json(view(id, &state.session(id)?.snapshot())))
}

async fn download_document(State(state): Shared, Path(id): Path<u64>) -> ApiResult<Json<SessionDocument>> {
    Ok(Json(state.session(id)?.snapshot().doc.clone()))
}

#[derive(Debug, Deserialize)]
pub struct SettingsEdit {
    pub base_revision: u64,
    pub resolution: Option<ResolutionSettings>,
    pub tolerances: Option<Tolerances>,
}

async fn set_settings(State(state): Shared, Path(id): Path<u64>, Json(req): Json<SettingsEdit>) -> ApiResult<Json<RevisionView>> {
    if let Some(r) = req.resolution {
        if r.samples < 8 || r.v_steps == 0 {
            return Err(ApiError::bad_request("resolution needs samples >= 8 and v_steps >= 1"));
        }
    }
    if let Some(t) = req.tolerances {
        if !(t.eps > 0.0 && t.tol > 0.0) || t.grid < MIN_GRID {
            return Err(ApiError::bad_request(format!("tolerances need positive eps and tol and grid >= {MIN_GRID}")));
        }
    }
    let snap = state.session(id)?.commit(req.base_revision, |doc| {
        if let Some(r) = req.resolution {
            doc.resolution = r;
        }
        if let Some(t) = req.tolerances {
            doc.tolerances = t;
        }
        Ok(())
    })?;
    Ok(Json(RevisionView { revision: snap.revision }))
}

fn knot_view(snap: &Snapshot, name: &str) -> ApiResult<KnotView> {
    let knot = snap
        .doc
        .knot(name)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("no knot {name:?}")))?;
    Ok(KnotView {
        revision: snap.revision,
        knot,
    })
}

async fn get_points(State(state): Shared, Path((id, knot)): Path<(u64, String)>) -> ApiResult<Json<KnotView>> {
    Ok(Json(knot_view(&state.session(id)?.snapshot(), &knot)?))
}

/// Runs `edit` on the named knot inside a compare-and-set commit and
/// rejects results that fail validation.
fn edit_knot<F>(state: &AppState, id: u64, base: u64, name: &str, edit: F) -> ApiResult<KnotView>
where
    F: FnOnce(&mut KnotEntry) -> ApiResult<()>,
{
    let snap = state.session(id)?.commit(base, |doc| {
        let entry = doc
            .knot_mut(name)
            .ok_or_else(|| ApiError::not_found(format!("no knot {name:?}")))?;
        edit(entry)?;
        let verdict = entry.validate();
        if verdict.passed() {
            Ok(())
        } else {
            Err(ApiError::invalid(verdict))
        }
    })?;
    knot_view(&snap, name)
}

#[derive(Debug, Deserialize)]
pub struct PointsEdit {
    pub base_revision: u64,
    pub points: Vec<Point3>,
}

async fn set_points(
    State(state): Shared,
    Path((id, knot)): Path<(u64, String)>,
    Json(req): Json<PointsEdit>,
) -> ApiResult<Json<KnotView>> {
    Ok(Json(edit_knot(&state, id, req.base_revision, &knot, |k| {
        k.points = req.points;
        Ok(())
    })?))
}

#[derive(Debug, Deserialize)]
pub struct InsertEdit {
    pub base_revision: u64,
    pub segment: usize,
    pub fraction: f64,
}

async fn insert_point(
    State(state): Shared,
    Path((id, knot)): Path<(u64, String)>,
    Json(req): Json<InsertEdit>,
) -> ApiResult<Json<KnotView>> {
    Ok(Json(edit_knot(&state, id, req.base_revision, &knot, |k| {
        let p = k.polygon()?.insert_collinear(req.segment, req.fraction)?;
        k.points = p.points().to_vec();
        k.derived = true;
        Ok(())
    })?))
}

#[derive(Debug, Deserialize)]
pub struct RefineEdit {
    pub base_revision: u64,
    #[serde(default = "one")]
    pub iterations: usize,
}

fn one() -> usize {
    1
}

const MAX_REFINE_POINTS: usize = 1 << 16;

async fn refine_knot(
    State(state): Shared,
    Path((id, knot)): Path<(u64, String)>,
    Json(req): Json<RefineEdit>,
) -> ApiResult<Json<KnotView>> {
    Ok(Json(edit_knot(&state, id, req.base_revision, &knot, |k| {
        let mut p = k.polygon()?;
        for _ in 0..req.iterations {
            if p.len() * 2 > MAX_REFINE_POINTS {
                return Err(ApiError::bad_request(format!("refinement beyond {MAX_REFINE_POINTS} points")));
            }
            p = p.refine_midpoints();
        }
        k.points = p.points().to_vec();
        k.derived = true;
        Ok(())
    })?))
}

#[derive(Debug, Deserialize)]
pub struct MorphEdit {
    pub base_revision: u64,
    pub fixed: CurveSource,
    pub start: CurveSource,
    pub end: CurveSource,
}

async fn set_morph(
    State(state): Shared,
    Path((id, morph)): Path<(u64, String)>,
    Json(req): Json<MorphEdit>,
) -> ApiResult<Json<RevisionView>> {
    let snap = state.session(id)?.commit(req.base_revision, |doc| {
        let def = MorphDefinition {
            name: morph.clone(),
            fixed: req.fixed,
            start: req.start,
            end: req.end,
            extra: Default::default(),
        };
        // resolve once so bad references are rejected at commit time
        def.family(doc, doc.resolution.samples)?;
        doc.set_morph(def);
        Ok(())
    })?;
    Ok(Json(RevisionView { revision: snap.revision }))
}

#[derive(Debug, Deserialize)]
pub struct SampleQuery {
    pub s: f64,
    pub samples: Option<usize>,
    pub v_steps: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CurveView {
    pub revision: u64,
    pub curve: CurvePayload,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MeshView {
    pub revision: u64,
    pub mesh: MeshPayload,
}

const MAX_SAMPLES: usize = 4096;
const MAX_V_STEPS: usize = 512;

fn check_resolution(samples: usize, v_steps: usize) -> ApiResult<()> {
    if samples > MAX_SAMPLES || v_steps > MAX_V_STEPS {
        return Err(ApiError::bad_request(format!(
            "resolution limited to {MAX_SAMPLES} samples and {MAX_V_STEPS} v_steps"
        )));
    }
    Ok(())
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::from(Error::Domain(format!("worker failed: {e}"))))?
}

async fn get_curve(
    State(state): Shared,
    Path((id, morph)): Path<(u64, String)>,
    Query(q): Query<SampleQuery>,
) -> ApiResult<Json<CurveView>> {
    let snap = state.session(id)?.snapshot();
    let samples = q.samples.unwrap_or(snap.doc.resolution.samples);
    check_resolution(samples, 1)?;
    let curve = curve_payload(&snap.doc, &morph, q.s, samples)?;
    Ok(Json(CurveView {
        revision: snap.revision,
        curve,
    }))
}

async fn get_mesh(
    State(state): Shared,
    Path((id, morph)): Path<(u64, String)>,
    Query(q): Query<SampleQuery>,
) -> ApiResult<Json<MeshView>> {
    let snap = state.session(id)?.snapshot();
    let samples = q.samples.unwrap_or(snap.doc.resolution.samples);
    let v_steps = q.v_steps.unwrap_or(snap.doc.resolution.v_steps);
    check_resolution(samples, v_steps)?;
    let revision = snap.revision;
    let mesh = blocking(move || Ok(mesh_payload(&snap.doc, &morph, q.s, samples, v_steps)?)).await?;
    Ok(Json(MeshView { revision, mesh }))
}

#[derive(Debug, Default, Deserialize)]
pub struct TransitionRequest {
    pub grid: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct JobView {
    pub job: u64,
    pub session: u64,
    pub morph: String,
    pub revision: u64,
    pub evaluations: usize,
    #[serde(flatten)]
    pub state: JobState,
}

fn job_view(id: u64, job: &Job) -> JobView {
    JobView {
        job: id,
        session: job.session,
        morph: job.morph.clone(),
        revision: job.revision,
        evaluations: job.control.evaluations(),
        state: job.state.lock().expect("job lock").clone(),
    }
}

async fn start_transition(
    State(state): Shared,
    Path((id, morph)): Path<(u64, String)>,
    body: Option<Json<TransitionRequest>>,
) -> ApiResult<(StatusCode, Json<JobView>)> {
    let req = body.map(|Json(r)| r).unwrap_or_default();
    let session = state.session(id)?;
    let snap = session.snapshot();
    let mut settings = snap.doc.scan_settings();
    if let Some(grid) = req.grid {
        settings.grid = grid;
    }
    if let Some(tol) = req.tol {
        settings.tol = tol;
    }
    if settings.grid < MIN_GRID || settings.grid > 1 << 14 || !(settings.tol > 0.0) {
        return Err(ApiError::bad_request(format!("grid must lie in [{MIN_GRID}, 16384] and tol be positive")));
    }
    let samples = snap.doc.resolution.samples;
    check_resolution(samples, settings.v_steps)?;
    let family = snap
        .doc
        .morph(&morph)
        .ok_or_else(|| ApiError::not_found(format!("no morph {morph:?}")))?
        .family(&snap.doc, samples)?;

    let (job_id, job) = state.add_job(Job {
        session: id,
        morph: morph.clone(),
        revision: snap.revision,
        control: ScanControl::new(),
        state: std::sync::Mutex::new(JobState::Running),
    });
    let worker = job.clone();
    tokio::task::spawn_blocking(move || {
        let outcome = first_intersection_parameter_with(&family, settings, &worker.control);
        let next = match outcome {
            Ok(result) => {
                let payload = transition_payload(&morph, settings, samples, result.as_ref(), worker.control.evaluations());
                // recorded only if nobody edited the session meanwhile
                let recorded = session
                    .commit(worker.revision, |doc| {
                        doc.results.push(ResultEntry::Transition(payload.summary.clone()));
                        Ok(())
                    })
                    .is_ok();
                JobState::Done {
                    result: Box::new(payload),
                    recorded,
                }
            }
            Err(Error::Cancelled) => JobState::Cancelled,
            Err(e) => JobState::Failed { message: e.to_string() },
        };
        *worker.state.lock().expect("job lock") = next;
    });
    Ok((StatusCode::ACCEPTED, Json(job_view(job_id, &job))))
}

async fn job_status(State(state): Shared, Path(id): Path<u64>) -> ApiResult<Json<JobView>> {
    Ok(Json(job_view(id, &*state.job(id)?)))
}

async fn cancel_job(State(state): Shared, Path(id): Path<u64>) -> ApiResult<(StatusCode, Json<JobView>)> {
    let job = state.job(id)?;
    job.control.cancel();
    Ok((StatusCode::ACCEPTED, Json(job_view(id, &job))))
}

async fn job_result(State(state): Shared, Path(id): Path<u64>) -> ApiResult<Json<Value>> {
    let job = state.job(id)?;
    let current = job.state.lock().expect("job lock").clone();
    match current {
        JobState::Done { result, .. } => Ok(Json(serde_json::to_value(*result).map_err(Error::from)?)),
        other => Err(ApiError::conflict(
            job.revision,
            format!("job {id} has no result ({})", serde_json::to_value(&other).map_err(Error::from)?["state"]),
        )),
    }
}

//! HTTP facade over in-memory sessions. Each session holds either a model
//! document or a defect scenario with its parameters, plus committed
//! evidence with a version counter. Result bodies are the exact bytes the
//! CLI prints for the same inputs.

mod session;

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use serde::{Deserialize, Serialize};

use heisenbn::bn::{evidence_probability, Evidence};
use heisenbn::defect::{DefectModelParams, DefectTemplate, PREDICTION_TARGETS};
use heisenbn::io::render::{self, DEFAULT_SENSITIVITY_TARGET};
use heisenbn::io::{
    evidence_document, read_document, to_canonical_json, validate_params_at, ErrorKind, ErrorReport, EvidenceDocument,
    ModelDocument, ParseOptions, ScenarioDocument,
};

use session::{Committed, Session, Subject};

/// Body of `POST /sessions`: a model, a scenario, or a model whose template
/// block supplies the parameters for a scenario.
#[derive(Debug, Deserialize)]
pub struct CreateSession {
    #[serde(default)]
    pub model: Option<ModelDocument>,
    #[serde(default)]
    pub scenario: Option<ScenarioDocument>,
    /// Defect-model parameters; defaults when absent.
    #[serde(default)]
    pub params: Option<DefectModelParams>,
    #[serde(default)]
    pub evidence: Option<EvidenceDocument>,
}

#[derive(Debug, Serialize)]
pub struct SessionInfo {
    pub id: String,
    pub kind: &'static str,
    pub created_at: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<String>,
    pub nodes: Vec<String>,
    pub evidence_version: u64,
    pub evidence: EvidenceDocument,
}

#[derive(Debug, Serialize)]
pub struct EvidenceVersion {
    pub version: u64,
}

#[derive(Debug, Deserialize)]
pub struct DiagnoseRequest {
    pub found: u64,
}

/// Findings applied for one request only. `node` and `state` give a single
/// hard finding; `evidence` may add more.
#[derive(Debug, Deserialize)]
pub struct WhatIfRequest {
    #[serde(default)]
    pub node: Option<String>,
    #[serde(default)]
    pub state: Option<String>,
    #[serde(default)]
    pub evidence: Option<EvidenceDocument>,
    #[serde(default)]
    pub targets: Option<Vec<String>>,
}

pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    opts: ParseOptions,
}

pub struct ApiError(pub ErrorReport);

impl From<ErrorReport> for ApiError {
    fn from(r: ErrorReport) -> Self {
        ApiError(r)
    }
}

pub fn status_of(kind: ErrorKind) -> StatusCode {
    match kind {
        ErrorKind::Syntax | ErrorKind::Schema | ErrorKind::Validation => StatusCode::BAD_REQUEST,
        ErrorKind::UnknownNode | ErrorKind::UnknownSession => StatusCode::NOT_FOUND,
        ErrorKind::ImpossibleEvidence => StatusCode::CONFLICT,
        ErrorKind::Runtime => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (status_of(self.0.kind), [(header::CONTENT_TYPE, "application/json")], to_canonical_json(&self.0)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

fn json<T: Serialize>(status: StatusCode, value: &T) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], to_canonical_json(value)).into_response()
}

fn body_text(body: &Bytes) -> Result<&str, ApiError> {
    std::str::from_utf8(body).map_err(|e| ApiError(ErrorReport::new(ErrorKind::Syntax, "$", e)))
}

fn invalid(path: &str, message: impl ToString) -> ApiError {
    ApiError(ErrorReport::new(ErrorKind::Validation, path, message))
}

/// Run CPU-bound work off the async workers.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ErrorReport> + Send + 'static) -> Result<T, ApiError> {
    match tokio::task::spawn_blocking(f).await {
        Ok(r) => r.map_err(ApiError),
        Err(e) => Err(ApiError(ErrorReport::new(ErrorKind::Runtime, "$", e))),
    }
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()
}

impl AppState {
    pub fn new(opts: ParseOptions) -> Self {
        AppState { sessions: RwLock::new(HashMap::new()), opts }
    }

    fn session(&self, id: &str) -> Result<Arc<Session>, ApiError> {
        self.sessions.read().expect("sessions lock").get(id).cloned().ok_or_else(|| {
            ApiError(ErrorReport::new(ErrorKind::UnknownSession, id, format!("unknown session '{id}'")))
        })
    }

    fn create(&self, req: CreateSession) -> Result<Arc<Session>, ErrorReport> {
        let subject = match (req.model, req.scenario) {
            (None, None) => return Err(ErrorReport::new(ErrorKind::Validation, "$", "either model or scenario is required")),
            (Some(m), None) => {
                if req.params.is_some() {
                    return Err(ErrorReport::new(ErrorKind::Validation, "params", "params apply only to scenario sessions"));
                }
                Subject::Model { network: m.to_network().map_err(|e| ErrorReport::from(e).in_document("model"))? }
            }
            (model, Some(doc)) => {
                let params = match (req.params, model) {
                    (Some(p), _) => {
                        validate_params_at(&p, "params")?;
                        p
                    }
                    (None, Some(m)) => m.template.clone().ok_or_else(|| {
                        ErrorReport::new(ErrorKind::Validation, "model.template", "model has no template block for the scenario")
                    })?,
                    (None, None) => DefectModelParams::default(),
                };
                let scenario = doc.to_scenario("scenario")?;
                let template = DefectTemplate::new(params)?;
                let dn = template.instantiate(&scenario)?;
                Subject::Scenario { template: Box::new(template), scenario, network: dn.network, base: dn.evidence }
            }
        };
        let id = uuid::Uuid::new_v4().simple().to_string();
        let created_at = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let session = Session { id, created_at, subject, committed: Mutex::new(Committed { evidence: Evidence::new(), version: 0 }) };
        if let Some(doc) = req.evidence {
            let ev = render::resolve_evidence(&doc, session.network()).map_err(|e| e.in_document("evidence"))?;
            check_possible(&session, &ev)?;
            let mut c = session.committed.lock().expect("session lock");
            c.evidence = ev;
            c.version = 1;
        }
        Ok(Arc::new(session))
    }
}

fn check_possible(session: &Session, committed: &Evidence) -> Result<(), ErrorReport> {
    let p = evidence_probability(session.network(), &session.effective(committed))?;
    if p > 0.0 {
        Ok(())
    } else {
        Err(ErrorReport::from(heisenbn::bn::BnError::ZeroProbabilityEvidence))
    }
}

fn info(session: &Session) -> Result<SessionInfo, ErrorReport> {
    let (ev, version) = session.snapshot();
    let net = session.network();
    Ok(SessionInfo {
        id: session.id.clone(),
        kind: session.kind(),
        created_at: session.created_at,
        scenario: match &session.subject {
            Subject::Scenario { scenario, .. } => scenario.name.clone(),
            Subject::Model { .. } => None,
        },
        nodes: (0..net.len()).map(|i| net.node_at(i).id().to_string()).collect(),
        evidence_version: version,
        evidence: evidence_document(&ev, net)?,
    })
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult {
    let req: CreateSession = read_document(body_text(&body)?, app.opts).map_err(ErrorReport::from)?;
    let app2 = app.clone();
    let session = blocking(move || app2.create(req)).await?;
    let out = info(&session)?;
    app.sessions.write().expect("sessions lock").insert(session.id.clone(), session);
    Ok(json(StatusCode::CREATED, &out))
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let session = app.session(&id)?;
    Ok(json(StatusCode::OK, &info(&session)?))
}

async fn put_evidence(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let session = app.session(&id)?;
    let doc: EvidenceDocument = read_document(body_text(&body)?, app.opts).map_err(ErrorReport::from)?;
    let ev = render::resolve_evidence(&doc, session.network())?;
    let s = session.clone();
    let version = blocking(move || {
        check_possible(&s, &ev)?;
        let mut c = s.committed.lock().expect("session lock");
        c.evidence = ev;
        c.version += 1;
        Ok(c.version)
    })
    .await?;
    Ok(json(StatusCode::OK, &EvidenceVersion { version }))
}

fn all_nodes(session: &Session) -> Vec<String> {
    let net = session.network();
    (0..net.len()).map(|i| net.node_at(i).id().to_string()).collect()
}

async fn posteriors(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<BTreeMap<String, String>>,
) -> ApiResult {
    let session = app.session(&id)?;
    let targets = q.get("targets").map(|t| split_list(t)).unwrap_or_else(|| all_nodes(&session));
    let report = blocking(move || {
        let (ev, _) = session.snapshot();
        let refs: Vec<&str> = targets.iter().map(String::as_str).collect();
        Ok(render::infer(session.network(), &session.effective(&ev), &refs)?)
    })
    .await?;
    Ok(json(StatusCode::OK, &report))
}

fn scenario_only(session: &Session) -> Result<(), ApiError> {
    match session.subject {
        Subject::Scenario { .. } => Ok(()),
        Subject::Model { .. } => Err(invalid("$", "session has no scenario")),
    }
}

async fn predict(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult {
    let session = app.session(&id)?;
    scenario_only(&session)?;
    let out = blocking(move || match &session.subject {
        Subject::Scenario { template, scenario, .. } => Ok(render::predict(template, scenario, &session.snapshot().0)?),
        Subject::Model { .. } => unreachable!(),
    })
    .await?;
    Ok(json(StatusCode::OK, &out))
}

async fn diagnose(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let session = app.session(&id)?;
    scenario_only(&session)?;
    let req: DiagnoseRequest = read_document(body_text(&body)?, app.opts).map_err(ErrorReport::from)?;
    let out = blocking(move || match &session.subject {
        Subject::Scenario { template, scenario, .. } => {
            Ok(render::diagnose(template, scenario, &session.snapshot().0, req.found)?)
        }
        Subject::Model { .. } => unreachable!(),
    })
    .await?;
    Ok(json(StatusCode::OK, &out))
}

async fn whatif(State(app): State<Arc<AppState>>, Path(id): Path<String>, body: Bytes) -> ApiResult {
    let session = app.session(&id)?;
    let req: WhatIfRequest = read_document(body_text(&body)?, app.opts).map_err(ErrorReport::from)?;
    let net = session.network();
    let mut overlay = match &req.evidence {
        Some(doc) => render::resolve_evidence(doc, net).map_err(|e| e.in_document("evidence"))?,
        None => Evidence::new(),
    };
    match (req.node, req.state) {
        (Some(node), Some(state)) => {
            let mut doc = EvidenceDocument::default();
            doc.0.insert(node, heisenbn::io::FindingDoc::State(state));
            overlay = overlay.overlaid(&render::resolve_evidence(&doc, net)?);
        }
        (None, None) => {}
        (Some(_), None) => return Err(invalid("state", "state is required with node")),
        (None, Some(_)) => return Err(invalid("node", "node is required with state")),
    }
    let targets = req.targets.unwrap_or_else(|| match session.subject {
        Subject::Scenario { .. } => PREDICTION_TARGETS.iter().map(|t| t.to_string()).collect(),
        Subject::Model { .. } => all_nodes(&session),
    });
    let report = blocking(move || {
        let (ev, _) = session.snapshot();
        let combined = session.effective(&ev).overlaid(&overlay);
        let refs: Vec<&str> = targets.iter().map(String::as_str).collect();
        Ok(render::infer(session.network(), &combined, &refs)?)
    })
    .await?;
    Ok(json(StatusCode::OK, &report))
}

async fn sensitivity(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(q): Query<BTreeMap<String, String>>,
) -> ApiResult {
    let session = app.session(&id)?;
    let target = match (q.get("target"), &session.subject) {
        (Some(t), _) => t.clone(),
        (None, Subject::Scenario { .. }) => DEFAULT_SENSITIVITY_TARGET.to_string(),
        (None, Subject::Model { .. }) => return Err(invalid("target", "target is required for model sessions")),
    };
    let inputs = q.get("inputs").map(|s| split_list(s));
    let out = blocking(move || {
        let (ev, _) = session.snapshot();
        Ok(render::sensitivity(session.network(), &session.effective(&ev), &target, inputs.as_deref())?)
    })
    .await?;
    Ok(json(StatusCode::OK, &out))
}

pub fn router(opts: ParseOptions) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/evidence", put(put_evidence))
        .route("/sessions/{id}/posteriors", get(posteriors))
        .route("/sessions/{id}/predict", get(predict))
        .route("/sessions/{id}/diagnose", post(diagnose))
        .route("/sessions/{id}/whatif", post(whatif))
        .route("/sessions/{id}/sensitivity", get(sensitivity))
        .with_state(Arc::new(AppState::new(opts)))
}

/// Serve until interrupted.
pub async fn serve(addr: SocketAddr, opts: ParseOptions) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(opts))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

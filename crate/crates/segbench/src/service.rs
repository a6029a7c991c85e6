//! HTTP API for live interactive sessions.
//!
//! | method | path                      | result                                   |
//! |--------|---------------------------|------------------------------------------|
//! | POST   | `/sessions`               | 201 `{"id", "width", "height"}`          |
//! | POST   | `/sessions/{id}/scribbles`| 204                                      |
//! | POST   | `/sessions/{id}/refine`   | 200 `{"mask", "metrics", "depth"}`       |
//! | POST   | `/sessions/{id}/undo`     | 200 `{"depth"}`                          |
//! | GET    | `/sessions/{id}/mask`     | 200 `image/png`                          |
//! | GET    | `/sessions/{id}/metrics`  | 200 metrics history                      |
//! | GET    | `/sessions/{id}`          | 200 session state                        |
//!
//! Errors are JSON objects with `error` (a stable code) and `message`.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex as StdMutex};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, Multipart, Path as UrlPath, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use base64::Engine;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use segbench_core::interaction::{
    auto_seeds, AutoSegmenter, FixedMask, GrabCutRefiner, GraphCutRefiner, OtsuSegmenter, SeededSegmenter,
};
use segbench_core::metrics::{alpha_beta, iou, MetricsSnapshot};
use segbench_core::{Annotation, BinaryMask, Error as CoreError, LabelRaster, Raster};
use tokio::sync::Mutex;
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

use crate::config::{AlgorithmKind, AlgorithmParams};
use crate::error::BenchError;
use crate::external::ExternalMaskManifest;
use crate::io::{decode_mask_png, decode_png, encode_mask_png, encode_png, read_json, write_json};

/// Seeds eroded from an automatic mask before graph-cut refinement.
const AUTO_SEED_EROSION: u32 = 3;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    /// Holds `external/manifest.json` for precomputed masks and `ui/` for
    /// static files.
    pub data_dir: Option<PathBuf>,
    /// Snapshot directory; sessions are in memory only when unset.
    pub persist_dir: Option<PathBuf>,
    /// Allowed browser origin; any origin when unset.
    pub cors_origin: Option<String>,
    /// Idle sessions are dropped from memory after this long.
    pub ttl: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            data_dir: None,
            persist_dir: None,
            cors_origin: None,
            ttl: Duration::from_secs(60 * 60),
        }
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    extra: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            extra: Value::Null,
        }
    }

    fn with(mut self, extra: Value) -> Self {
        self.extra = extra;
        self
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no session {id:?}"))
    }

    fn internal(message: impl std::fmt::Display) -> Self {
        let error_id = format!("{:016x}", rand::random::<u64>());
        eprintln!("error {error_id}: {message}");
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message.to_string()).with(json!({ "error_id": error_id }))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.code, "message": self.message });
        if let (Value::Object(b), Value::Object(extra)) = (&mut body, self.extra) {
            b.extend(extra);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Serializable part of a session.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SessionMeta {
    pub id: String,
    pub algorithm: String,
    pub kind: AlgorithmKind,
    pub params: Value,
    pub image_id: Option<String>,
    pub width: usize,
    pub height: usize,
    pub has_gt: bool,
    pub pool: Annotation,
    pub metrics: Vec<MetricsSnapshot>,
    /// Unix seconds.
    pub created: f64,
    /// Unix seconds of the last state change.
    pub updated: f64,
    /// Unix seconds of every request that touched the session.
    pub request_times: Vec<f64>,
}

struct Session {
    meta: SessionMeta,
    params: Arc<AlgorithmParams>,
    image: Arc<Raster>,
    gt: Option<BinaryMask>,
    external: Option<Arc<BinaryMask>>,
    masks: Vec<BinaryMask>,
    touched: Instant,
}

impl Session {
    fn touch(&mut self) {
        self.touched = Instant::now();
        self.meta.request_times.push(unix_now());
    }

    fn depth(&self) -> usize {
        self.masks.len()
    }
}

struct Inner {
    config: ServiceConfig,
    sessions: StdMutex<HashMap<String, Arc<Mutex<Session>>>>,
}

#[derive(Clone)]
pub struct AppState(Arc<Inner>);

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

fn new_session_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}

fn is_session_id(id: &str) -> bool {
    id.len() == 32 && id.bytes().all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase())
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        Self(Arc::new(Inner {
            config,
            sessions: StdMutex::new(HashMap::new()),
        }))
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.0.config
    }

    /// Number of sessions held in memory.
    pub fn live_sessions(&self) -> usize {
        self.0.sessions.lock().unwrap().len()
    }

    /// Drops sessions idle for longer than the TTL; busy sessions are kept.
    pub fn evict_idle(&self) -> usize {
        let ttl = self.0.config.ttl;
        let mut map = self.0.sessions.lock().unwrap();
        let before = map.len();
        map.retain(|_, s| match s.try_lock() {
            Ok(s) => s.touched.elapsed() < ttl,
            Err(_) => true,
        });
        before - map.len()
    }

    fn session(&self, id: &str) -> ApiResult<Arc<Mutex<Session>>> {
        if let Some(s) = self.0.sessions.lock().unwrap().get(id) {
            return Ok(s.clone());
        }
        let dir = match &self.0.config.persist_dir {
            Some(dir) if is_session_id(id) => dir.join(id),
            _ => return Err(ApiError::not_found(id)),
        };
        if !dir.join("session.json").is_file() {
            return Err(ApiError::not_found(id));
        }
        let loaded = load_snapshot(&dir).map_err(ApiError::internal)?;
        let mut map = self.0.sessions.lock().unwrap();
        Ok(map.entry(id.to_string()).or_insert_with(|| Arc::new(Mutex::new(loaded))).clone())
    }

    fn insert(&self, session: Session) {
        let id = session.meta.id.clone();
        self.0.sessions.lock().unwrap().insert(id, Arc::new(Mutex::new(session)));
    }

    fn persist(&self, s: &Session) -> ApiResult<()> {
        match &self.0.config.persist_dir {
            Some(dir) => save_snapshot(&dir.join(&s.meta.id), s).map_err(ApiError::internal),
            None => Ok(()),
        }
    }

    fn external_manifest(&self) -> Option<(ExternalMaskManifest, PathBuf)> {
        let dir = self.0.config.data_dir.as_ref()?.join("external");
        let manifest = read_json(dir.join("manifest.json")).ok()?;
        Some((manifest, dir))
    }
}

fn save_snapshot(dir: &Path, s: &Session) -> crate::Result<()> {
    let png = |name: &str, bytes: Vec<u8>| crate::io::write_file(&dir.join(name), &bytes);
    if !dir.join("image.png").is_file() {
        png("image.png", encode_png(&s.image))?;
        if let Some(gt) = &s.gt {
            png("gt.png", encode_mask_png(gt))?;
        }
        if let Some(ext) = &s.external {
            png("external.png", encode_mask_png(ext))?;
        }
    }
    for (k, m) in s.masks.iter().enumerate() {
        let name = format!("mask_{k:04}.png");
        if !dir.join(&name).is_file() {
            png(&name, encode_mask_png(m))?;
        }
    }
    let stale = dir.join(format!("mask_{:04}.png", s.masks.len()));
    if stale.is_file() {
        std::fs::remove_file(&stale).map_err(|e| BenchError::io(&stale, e))?;
    }
    write_json(&s.meta, dir.join("session.json"))
}

fn load_snapshot(dir: &Path) -> crate::Result<Session> {
    let meta: SessionMeta = read_json(dir.join("session.json"))?;
    let image = crate::io::load_image(dir.join("image.png"))?;
    let gt = if meta.has_gt {
        Some(crate::io::load_mask(dir.join("gt.png"))?)
    } else {
        None
    };
    let external = if meta.kind == AlgorithmKind::External {
        Some(Arc::new(crate::io::load_mask(dir.join("external.png"))?))
    } else {
        None
    };
    let masks = (0..meta.metrics.len())
        .map(|k| crate::io::load_mask(dir.join(format!("mask_{k:04}.png"))))
        .collect::<crate::Result<Vec<_>>>()?;
    let params = match meta.kind {
        AlgorithmKind::External => AlgorithmParams::Otsu,
        kind => AlgorithmParams::parse(kind, &meta.algorithm, &meta.params)?,
    };
    Ok(Session {
        meta,
        params: Arc::new(params),
        image: Arc::new(image),
        gt,
        external,
        masks,
        touched: Instant::now(),
    })
}

/// Builds the router with CORS and, when `data_dir/ui` exists, static files.
pub fn router(state: AppState) -> Router {
    let cors = match &state.config().cors_origin {
        Some(origin) => match HeaderValue::from_str(origin) {
            Ok(v) => CorsLayer::new().allow_origin(v),
            Err(_) => CorsLayer::new(),
        },
        None => CorsLayer::new().allow_origin(Any),
    }
    .allow_methods(Any)
    .allow_headers(Any);
    let ui = state.config().data_dir.as_ref().map(|d| d.join("ui")).filter(|d| d.is_dir());
    let mut app = Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/scribbles", post(add_scribbles))
        .route("/sessions/{id}/refine", post(refine))
        .route("/sessions/{id}/undo", post(undo))
        .route("/sessions/{id}/mask", get(get_mask))
        .route("/sessions/{id}/metrics", get(get_metrics))
        .layer(DefaultBodyLimit::max(64 * 1024 * 1024))
        .with_state(state);
    if let Some(ui) = ui {
        app = app.fallback_service(ServeDir::new(ui));
    }
    app.layer(cors)
}

/// Serves until the process is stopped, evicting idle sessions once a minute.
pub async fn serve(config: ServiceConfig, port: u16) -> std::io::Result<()> {
    let state = AppState::new(config);
    let evictor = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            evictor.evict_idle();
        }
    });
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}

#[derive(Default)]
struct CreateForm {
    image: Option<Bytes>,
    gt: Option<Bytes>,
    algorithm: Option<String>,
    params: Option<String>,
    image_id: Option<String>,
}

async fn read_form(mut multipart: Multipart) -> ApiResult<CreateForm> {
    let mut form = CreateForm::default();
    while let Some(field) = multipart
        .next_field()
        .await
        .map_err(|e| ApiError::bad_request(format!("malformed multipart body: {e}")))?
    {
        let name = field.name().unwrap_or_default().to_string();
        let bytes = field
            .bytes()
            .await
            .map_err(|e| ApiError::bad_request(format!("field {name:?}: {e}")))?;
        let text = || {
            String::from_utf8(bytes.to_vec()).map_err(|_| ApiError::bad_request(format!("field {name:?} is not UTF-8")))
        };
        match name.as_str() {
            "image" => form.image = Some(bytes.clone()),
            "gt" => form.gt = Some(bytes.clone()),
            "algorithm" => form.algorithm = Some(text()?.trim().to_string()),
            "params" => form.params = Some(text()?),
            "image_id" => form.image_id = Some(text()?.trim().to_string()),
            _ => {}
        }
    }
    Ok(form)
}

async fn create_session(State(app): State<AppState>, multipart: Multipart) -> ApiResult<impl IntoResponse> {
    let form = read_form(multipart).await?;
    let image_bytes = form.image.ok_or_else(|| ApiError::bad_request("missing field \"image\""))?;
    let image = decode_png(&image_bytes).map_err(|e| ApiError::bad_request(format!("image: {e}")))?;
    let gt = match &form.gt {
        Some(bytes) if !bytes.is_empty() => {
            let gt = decode_mask_png(bytes).map_err(|e| ApiError::bad_request(format!("gt: {e}")))?;
            gt.ensure_same_dims(image.dims())
                .map_err(|e| ApiError::bad_request(format!("gt: {e}")))?;
            Some(gt)
        }
        _ => None,
    };
    let algorithm = form
        .algorithm
        .filter(|a| !a.is_empty())
        .ok_or_else(|| ApiError::bad_request("missing field \"algorithm\""))?;
    let params: Value = match form.params.as_deref().map(str::trim) {
        None | Some("") => Value::Null,
        Some(p) => serde_json::from_str(p).map_err(|e| ApiError::bad_request(format!("params: {e}")))?,
    };
    let (kind, external) = match algorithm.parse::<AlgorithmKind>() {
        Ok(AlgorithmKind::External) | Err(_) => {
            let mask = external_mask(&app, &algorithm, form.image_id.as_deref(), &image)?;
            (AlgorithmKind::External, Some(Arc::new(mask)))
        }
        Ok(kind) => (kind, None),
    };
    let parsed = match kind {
        AlgorithmKind::External => AlgorithmParams::Otsu,
        kind => AlgorithmParams::parse(kind, &algorithm, &params).map_err(|e| ApiError::bad_request(e.to_string()))?,
    };
    let now = unix_now();
    let (width, height) = image.dims();
    let session = Session {
        meta: SessionMeta {
            id: new_session_id(),
            algorithm,
            kind,
            params,
            image_id: form.image_id,
            width,
            height,
            has_gt: gt.is_some(),
            pool: Annotation::new(),
            metrics: Vec::new(),
            created: now,
            updated: now,
            request_times: vec![now],
        },
        params: Arc::new(parsed),
        image: Arc::new(image),
        gt,
        external,
        masks: Vec::new(),
        touched: Instant::now(),
    };
    app.persist(&session)?;
    let body = json!({ "id": session.meta.id, "width": width, "height": height });
    app.insert(session);
    Ok((StatusCode::CREATED, Json(body)))
}

fn external_mask(app: &AppState, algorithm: &str, image_id: Option<&str>, image: &Raster) -> ApiResult<BinaryMask> {
    let unknown = || {
        let known: Vec<&str> = AlgorithmKind::ALL
            .iter()
            .filter(|k| **k != AlgorithmKind::External)
            .map(|k| k.name())
            .collect();
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "unknown_algorithm",
            format!(
                "unknown algorithm {algorithm:?}: no external mask provider with that name is configured; built-in algorithms are {}",
                known.join(", ")
            ),
        )
    };
    let (manifest, dir) = app.external_manifest().ok_or_else(unknown)?;
    if algorithm != "external" && algorithm != manifest.provider {
        return Err(unknown());
    }
    let id = image_id.ok_or_else(|| ApiError::bad_request("external masks need the \"image_id\" field"))?;
    let rel = manifest.masks.get(id).ok_or_else(|| {
        ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            "missing_mask",
            format!("provider {:?} has no mask for image {id:?}", manifest.provider),
        )
    })?;
    let mask = crate::io::load_mask(dir.join(rel)).map_err(ApiError::internal)?;
    mask.ensure_same_dims(image.dims())
        .map_err(|e| ApiError::bad_request(format!("external mask: {e}")))?;
    Ok(mask)
}

async fn add_scribbles(
    State(app): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Bytes,
) -> ApiResult<StatusCode> {
    let ann: Annotation =
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(format!("annotation: {e}")))?;
    let entry = app.session(&id)?;
    let mut s = entry.lock().await;
    s.touch();
    if let Err(e) = ann.validate(s.meta.width, s.meta.height) {
        let err = ApiError::new(StatusCode::BAD_REQUEST, "invalid_annotation", e.to_string());
        return Err(match e {
            CoreError::OutOfBounds { stroke, point, .. } => err.with(json!({ "stroke": stroke, "point": point })),
            CoreError::InvalidRadius { stroke } => err.with(json!({ "stroke": stroke })),
            _ => err,
        });
    }
    if !ann.is_empty() {
        s.meta.pool.extend(&ann);
        s.meta.updated = unix_now();
    }
    app.persist(&s)?;
    Ok(StatusCode::NO_CONTENT)
}

enum SegmentError {
    Seeds(Vec<&'static str>),
    Core(CoreError),
}

impl From<CoreError> for SegmentError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::MissingSeedClass(c) => SegmentError::Seeds(vec![c]),
            CoreError::NoSeeds => SegmentError::Seeds(vec!["foreground"]),
            CoreError::InsufficientLabels => SegmentError::Seeds(vec!["foreground", "background"]),
            e => SegmentError::Core(e),
        }
    }
}

fn required_classes(seeds: &LabelRaster, need_bg: bool) -> Result<(), SegmentError> {
    let mut missing = Vec::new();
    if !seeds.has_fg() {
        missing.push("foreground");
    }
    if need_bg && !seeds.has_bg() {
        missing.push("background");
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(SegmentError::Seeds(missing))
    }
}

/// The session's algorithm applied to the image and the whole stroke pool.
/// Automatic algorithms return their own mask while the pool is empty and a
/// graph cut seeded from that mask plus the pool afterwards.
fn segment(
    params: &AlgorithmParams,
    image: &Raster,
    pool: &Annotation,
    external: Option<&BinaryMask>,
) -> Result<BinaryMask, SegmentError> {
    let seeds = pool.rasterize(image.width(), image.height())?;
    let auto: Option<Box<dyn AutoSegmenter>> = match (params, external) {
        (_, Some(mask)) => Some(Box::new(FixedMask(mask.clone()))),
        (AlgorithmParams::Otsu, None) => Some(Box::new(OtsuSegmenter)),
        (AlgorithmParams::Canny(c), None) => Some(Box::new(*c)),
        _ => None,
    };
    if let Some(auto) = auto {
        let mask = auto.segment(image)?;
        if pool.is_empty() {
            return Ok(mask);
        }
        let mut s = auto_seeds(&mask, AUTO_SEED_EROSION);
        s.overlay(&seeds);
        required_classes(&s, true)?;
        return Ok(GraphCutRefiner::default().segment(image, &s)?);
    }
    let refiner: Box<dyn SeededSegmenter> = match params {
        AlgorithmParams::RegionGrow(r) => {
            required_classes(&seeds, false)?;
            Box::new(*r)
        }
        AlgorithmParams::Forest(f) => {
            required_classes(&seeds, true)?;
            Box::new(f.clone())
        }
        AlgorithmParams::GraphCut(g) => {
            required_classes(&seeds, true)?;
            Box::new(GraphCutRefiner(g.clone()))
        }
        AlgorithmParams::GrabCut(g) => {
            required_classes(&seeds, true)?;
            Box::new(GrabCutRefiner(g.clone()))
        }
        _ => unreachable!("automatic algorithms handled above"),
    };
    Ok(refiner.segment(image, &seeds)?)
}

fn mask_base64(mask: &BinaryMask) -> String {
    base64::engine::general_purpose::STANDARD.encode(encode_mask_png(mask))
}

async fn refine(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Value>> {
    let entry = app.session(&id)?;
    let mut s = entry.lock().await;
    s.touch();
    let (params, image, pool, external) = (s.params.clone(), s.image.clone(), s.meta.pool.clone(), s.external.clone());
    let started = Instant::now();
    let result = tokio::task::spawn_blocking(move || segment(&params, &image, &pool, external.as_deref()))
        .await
        .map_err(ApiError::internal)?;
    let compute_seconds = started.elapsed().as_secs_f64();
    let mask = match result {
        Ok(mask) => mask,
        Err(SegmentError::Seeds(missing)) => {
            return Err(ApiError::new(
                StatusCode::CONFLICT,
                "insufficient_seeds",
                format!("{} needs {} seeds", s.meta.algorithm, missing.join(" and ")),
            )
            .with(json!({ "missing": missing })))
        }
        Err(SegmentError::Core(e)) => return Err(ApiError::internal(format!("{}: {e}", s.meta.algorithm))),
    };
    if mask.dims() != s.image.dims() {
        return Err(ApiError::internal("algorithm returned a mask of the wrong size"));
    }
    let now = unix_now();
    let mut metrics = MetricsSnapshot {
        compute_seconds,
        interaction_seconds: (now - s.meta.updated).max(0.0),
        ..Default::default()
    };
    if let Some(gt) = &s.gt {
        metrics.iou = iou(gt, &mask).ok();
        if let Ok((a, b)) = alpha_beta(gt, &mask) {
            metrics.alpha = Some(a);
            metrics.beta = Some(b);
        }
    }
    let body = json!({ "mask": mask_base64(&mask), "metrics": metrics, "depth": s.depth() + 1 });
    s.masks.push(mask);
    s.meta.metrics.push(metrics);
    s.meta.updated = now;
    app.persist(&s)?;
    Ok(Json(body))
}

async fn undo(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Value>> {
    let entry = app.session(&id)?;
    let mut s = entry.lock().await;
    s.touch();
    if s.masks.is_empty() {
        return Err(ApiError::new(StatusCode::CONFLICT, "empty_history", "nothing to undo"));
    }
    s.masks.pop();
    s.meta.metrics.pop();
    s.meta.updated = unix_now();
    app.persist(&s)?;
    Ok(Json(json!({ "depth": s.depth() })))
}

async fn get_mask(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Response> {
    let entry = app.session(&id)?;
    let mut s = entry.lock().await;
    s.touch();
    let mask = s
        .masks
        .last()
        .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "no_mask", "no mask yet; call refine first"))?;
    Ok(([(header::CONTENT_TYPE, "image/png")], encode_mask_png(mask)).into_response())
}

async fn get_metrics(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Vec<MetricsSnapshot>>> {
    let entry = app.session(&id)?;
    let mut s = entry.lock().await;
    s.touch();
    Ok(Json(s.meta.metrics.clone()))
}

async fn get_session(State(app): State<AppState>, UrlPath(id): UrlPath<String>) -> ApiResult<Json<Value>> {
    let entry = app.session(&id)?;
    let mut s = entry.lock().await;
    s.touch();
    let mut body = serde_json::to_value(&s.meta).map_err(ApiError::internal)?;
    body["depth"] = json!(s.depth());
    Ok(Json(body))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_128_bit_hex() {
        let a = new_session_id();
        assert!(is_session_id(&a));
        assert_ne!(a, new_session_id());
        assert!(!is_session_id("../etc/passwd"));
        assert!(!is_session_id(&a.to_uppercase()));
    }

    #[test]
    fn missing_classes_are_listed() {
        let seeds = LabelRaster::new(4, 4);
        match required_classes(&seeds, true) {
            Err(SegmentError::Seeds(m)) => assert_eq!(m, ["foreground", "background"]),
            _ => panic!("expected missing seeds"),
        }
        assert!(required_classes(&seeds, false).is_err());
    }
}

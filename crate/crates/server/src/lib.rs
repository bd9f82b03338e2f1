//! HTTP API over a directory of ensemble datasets.
//!
//! Routes:
//!
//! - `GET /api/datasets`
//! - `GET /api/datasets/{id}/glyphs?t=&type=&region=&exponent=&scale=&segments=&body=`
//! - `GET /api/datasets/{id}/depth?t=&region=`
//! - `GET /api/datasets/{id}/point?t=&i=&j=&k=&outliers=`
//! - `GET /api/datasets/{id}/magvar?t=`
//!
//! Errors are JSON `{status, code, message}`.

mod error;
mod registry;

use std::collections::HashMap;
use std::net::SocketAddr;
use std::str::FromStr;
use std::sync::Arc;

use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use squid_core::field::{GridIndex, RegionSelection};
use squid_core::glyph::{BodyShape, GlyphKind, GlyphScene, SceneRequest};
use squid_core::point::{depth_heatmap, point_detail};
use squid_core::summary::magvar;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use error::ApiError;
pub use registry::{Dataset, DatasetInfo, Registry, SkippedDataset};

type Shared = Arc<Registry>;
type ApiResult<T> = std::result::Result<T, ApiError>;

/// Builds the router. `cors_origin` of `"*"` allows any origin.
pub fn router(registry: Shared, cors_origin: Option<&str>) -> ApiResult<Router> {
    let app = Router::new()
        .route("/api/datasets", get(list_datasets))
        .route("/api/datasets/{id}/glyphs", get(glyphs))
        .route("/api/datasets/{id}/depth", get(depth))
        .route("/api/datasets/{id}/point", get(point))
        .route("/api/datasets/{id}/magvar", get(magnitude_variation))
        .fallback(|| async {
            ApiError::new(
                axum::http::StatusCode::NOT_FOUND,
                "not_found",
                "no such route",
            )
        })
        .with_state(registry);
    Ok(match cors_origin {
        None => app,
        Some(origin) => {
            let allow = if origin == "*" {
                AllowOrigin::any()
            } else {
                let v = HeaderValue::from_str(origin)
                    .map_err(|_| ApiError::bad_parameter(format!("bad CORS origin {origin:?}")))?;
                AllowOrigin::exact(v)
            };
            app.layer(
                CorsLayer::new()
                    .allow_origin(allow)
                    .allow_methods([Method::GET]),
            )
        }
    })
}

/// Binds `addr` and serves until the process is stopped.
pub async fn serve(
    registry: Registry,
    addr: SocketAddr,
    cors_origin: Option<&str>,
) -> std::io::Result<()> {
    let app = router(Arc::new(registry), cors_origin)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidInput, e.message))?;
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, app).await
}

struct Params(HashMap<String, String>);

impl Params {
    fn from(
        q: std::result::Result<Query<HashMap<String, String>>, QueryRejection>,
    ) -> ApiResult<Self> {
        q.map(|Query(m)| Params(m))
            .map_err(|e| ApiError::bad_parameter(e.body_text()))
    }

    fn opt<T: FromStr>(&self, key: &str) -> ApiResult<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| ApiError::bad_parameter(format!("cannot parse {key}={raw:?}"))),
        }
    }

    fn req<T: FromStr>(&self, key: &str) -> ApiResult<T> {
        self.opt(key)?
            .ok_or_else(|| ApiError::bad_parameter(format!("missing query parameter {key}")))
    }

    fn region(&self) -> ApiResult<Option<RegionSelection>> {
        match self.0.get("region") {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e: squid_core::Error| e.into()),
        }
    }
}

fn dataset<'a>(reg: &'a Registry, id: &str) -> ApiResult<&'a Dataset> {
    reg.get(id).ok_or_else(|| ApiError::unknown_dataset(id))
}

fn json_body(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

/// Runs CPU-bound work off the async executor.
async fn blocking<T, F>(f: F) -> ApiResult<T>
where
    F: FnOnce() -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

async fn list_datasets(State(reg): State<Shared>) -> Json<Vec<DatasetInfo>> {
    Json(reg.list())
}

fn scene_request(p: &Params) -> ApiResult<SceneRequest> {
    let d = SceneRequest::default();
    let kind = match p.0.get("type") {
        None => d.kind,
        Some(raw) => GlyphKind::from_str(raw)?,
    };
    let body = match p.0.get("body") {
        None => d.body,
        Some(raw) => BodyShape::from_str(raw)?,
    };
    Ok(SceneRequest {
        t: p.opt("t")?.unwrap_or(d.t),
        region: p.region()?,
        kind,
        exponent: p.opt("exponent")?.unwrap_or(d.exponent),
        segments: p.opt("segments")?.unwrap_or(d.segments),
        user_scale: p.opt("scale")?.unwrap_or(d.user_scale),
        body,
    })
}

async fn glyphs(
    State(reg): State<Shared>,
    Path(id): Path<String>,
    q: std::result::Result<Query<HashMap<String, String>>, QueryRejection>,
) -> ApiResult<Response> {
    let req = scene_request(&Params::from(q)?)?;
    dataset(&reg, &id)?;
    let body = blocking(move || {
        let ds = dataset(&reg, &id)?;
        let sums = ds
            .summaries(req.t)
            .map_err(|e| ApiError::from(e.as_ref()))?;
        Ok(GlyphScene::build(&ds.field, &sums, &req)?.to_json())
    })
    .await?;
    Ok(json_body(body))
}

async fn depth(
    State(reg): State<Shared>,
    Path(id): Path<String>,
    q: std::result::Result<Query<HashMap<String, String>>, QueryRejection>,
) -> ApiResult<Response> {
    let p = Params::from(q)?;
    let t: usize = p.opt("t")?.unwrap_or(0);
    let region = p.region()?;
    dataset(&reg, &id)?;
    let body = blocking(move || {
        let ds = dataset(&reg, &id)?;
        let region = region.unwrap_or_else(|| RegionSelection::full(ds.field.dims()));
        let m = depth_heatmap(&ds.field, &region, t)?;
        serde_json::to_string(&m).map_err(|e| ApiError::internal(e.to_string()))
    })
    .await?;
    Ok(json_body(body))
}

async fn point(
    State(reg): State<Shared>,
    Path(id): Path<String>,
    q: std::result::Result<Query<HashMap<String, String>>, QueryRejection>,
) -> ApiResult<Response> {
    let p = Params::from(q)?;
    let idx = GridIndex::new(
        p.req("i")?,
        p.req("j")?,
        p.opt("k")?.unwrap_or(0),
        p.opt("t")?.unwrap_or(0),
    );
    let k: usize = p.opt("outliers")?.unwrap_or(0);
    dataset(&reg, &id)?;
    let body = blocking(move || {
        let ds = dataset(&reg, &id)?;
        let a = point_detail(&ds.field, idx, k)?;
        serde_json::to_string(&a).map_err(|e| ApiError::internal(e.to_string()))
    })
    .await?;
    Ok(json_body(body))
}

async fn magnitude_variation(
    State(reg): State<Shared>,
    Path(id): Path<String>,
    q: std::result::Result<Query<HashMap<String, String>>, QueryRejection>,
) -> ApiResult<Response> {
    let p = Params::from(q)?;
    let t: Option<usize> = p.opt("t")?;
    dataset(&reg, &id)?;
    let body = blocking(move || {
        let ds = dataset(&reg, &id)?;
        let mv = magvar(&ds.field, t)?;
        serde_json::to_string(&mv).map_err(|e| ApiError::internal(e.to_string()))
    })
    .await?;
    Ok(json_body(body))
}

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, Response, StatusCode};
use axum::Router;
use tokio::net::TcpListener;

use super::api::{Api, ApiResponse};
use crate::error::{Error, Result};

fn respond(resp: ApiResponse) -> Response<Body> {
    let status = StatusCode::from_u16(resp.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    Response::builder()
        .status(status)
        .header(header::CONTENT_TYPE, "application/json")
        .header(header::ACCESS_CONTROL_ALLOW_ORIGIN, "*")
        .header(header::ACCESS_CONTROL_ALLOW_METHODS, "GET, OPTIONS")
        .body(Body::from(resp.body.to_string()))
        .expect("static response parts are valid")
}

async fn dispatch(api: Arc<Api>, req: Request<Body>) -> Response<Body> {
    match *req.method() {
        Method::GET | Method::HEAD => {
            let uri = req.uri();
            respond(api.handle(uri.path(), uri.query().unwrap_or("")))
        }
        Method::OPTIONS => respond(ApiResponse {
            status: 204,
            body: serde_json::Value::Null,
        }),
        _ => {
            let mut r = respond(ApiResponse {
                status: 405,
                body: serde_json::json!({
                    "version": crate::atlas::FORMAT_VERSION,
                    "error": "METHOD_NOT_ALLOWED",
                    "message": "the API is read-only",
                }),
            });
            r.headers_mut().insert(header::ALLOW, "GET, OPTIONS".parse().expect("valid header"));
            r
        }
    }
}

/// The API as an axum router. All routing happens in [`Api::handle`].
pub fn router(api: Arc<Api>) -> Router {
    Router::new().fallback(move |req: Request<Body>| dispatch(api.clone(), req))
}

/// Binds `addr` and serves until the process ends. `on_bound` receives the
/// actual address (useful with port 0).
pub async fn serve(api: Api, addr: SocketAddr, on_bound: impl FnOnce(SocketAddr)) -> Result<()> {
    let listener = TcpListener::bind(addr).await.map_err(|e| Error::io(addr.to_string(), e))?;
    let local = listener.local_addr().map_err(|e| Error::io(addr.to_string(), e))?;
    on_bound(local);
    axum::serve(listener, router(Arc::new(api)))
        .await
        .map_err(|e| Error::io(local.to_string(), e))
}

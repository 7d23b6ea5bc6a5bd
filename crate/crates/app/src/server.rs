use std::net::SocketAddr;
use std::path::PathBuf;

use axum::body::Bytes;
use axum::http::{header, Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::routing::any;
use axum::Router;
use poncelet::api::{dispatch, ApiResponse};
use tower_http::services::ServeDir;

async fn api(method: Method, uri: Uri, body: Bytes) -> Response {
    let text = match String::from_utf8(body.to_vec()) {
        Ok(t) => t,
        Err(_) => return (StatusCode::BAD_REQUEST, "request body is not UTF-8").into_response(),
    };
    let path = uri.path().to_string();
    // Sweeps can take a while; keep them off the async workers.
    let res = tokio::task::spawn_blocking(move || dispatch(method.as_str(), &path, &text)).await;
    match res {
        Ok(ApiResponse { status, content_type, body }) => (
            StatusCode::from_u16(status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR),
            [(header::CONTENT_TYPE, content_type)],
            body,
        )
            .into_response(),
        Err(_) => StatusCode::INTERNAL_SERVER_ERROR.into_response(),
    }
}

/// The service: `/api/...` goes to the engine, anything else to the static
/// bundle when one is given.
pub fn router(static_dir: Option<PathBuf>) -> Router {
    let app = Router::new().route("/api/{*rest}", any(api));
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.fallback(api),
    }
}

pub fn serve(port: u16, static_dir: Option<PathBuf>) -> std::io::Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let addr = SocketAddr::from(([0, 0, 0, 0], port));
        let listener = tokio::net::TcpListener::bind(addr).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, router(static_dir)).await
    })
}

use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use http_body_util::BodyExt;
use poncelet::session::{encode, ExperimentState};
use poncelet_app::router;
use serde_json::Value;
use tower::ServiceExt;

async fn call(app: axum::Router, method: &str, uri: &str, body: &str) -> (StatusCode, String, String) {
    let req = Request::builder().method(method).uri(uri).body(Body::from(body.to_string())).unwrap();
    let res = app.oneshot(req).await.unwrap();
    let status = res.status();
    let ctype = res.headers().get(header::CONTENT_TYPE).map(|v| v.to_str().unwrap().to_string()).unwrap_or_default();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, ctype, String::from_utf8(bytes.to_vec()).unwrap())
}

#[tokio::test]
async fn locus_over_http_matches_dispatch() {
    let body = r#"{"family":{"kind":"confocal","a":2,"b":1},"target":{"center":1}}"#;
    let (status, ctype, text) = call(router(None), "POST", "/api/locus", body).await;
    assert_eq!(status, StatusCode::OK);
    assert!(ctype.starts_with("application/json"));
    assert_eq!(text, poncelet::api::dispatch("POST", "/api/locus", body).body);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["classification"]["kind"], "ellipse");
}

#[tokio::test]
async fn errors_keep_their_status() {
    let body = r#"{"family":{"kind":"circumcircle","a":2,"b":1},"target":{"center":3}}"#;
    let (status, _, text) = call(router(None), "POST", "/api/locus", body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(serde_json::from_str::<Value>(&text).unwrap()["code"], "InvalidAspect");
    let (status, _, _) = call(router(None), "GET", "/api/locus", "").await;
    assert_eq!(status, StatusCode::METHOD_NOT_ALLOWED);
    let (status, _, _) = call(router(None), "GET", "/nowhere", "").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn state_and_render() {
    let blob = encode(&ExperimentState::default());
    let (status, _, text) = call(router(None), "GET", &format!("/api/state/{blob}"), "").await;
    assert_eq!(status, StatusCode::OK);
    let state: ExperimentState = serde_json::from_str(&text).unwrap();
    assert_eq!(state, ExperimentState::default());
    let (status, ctype, svg) = call(router(None), "POST", "/api/render", &format!(r#"{{"state":"{blob}"}}"#)).await;
    assert_eq!(status, StatusCode::OK);
    assert!(ctype.starts_with("image/svg+xml"));
    roxmltree::Document::parse(&svg).unwrap();
}

#[tokio::test]
async fn static_bundle_is_served_beside_the_api() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<html>ui</html>").unwrap();
    let app = router(Some(dir.path().to_path_buf()));
    let (status, _, text) = call(app.clone(), "GET", "/index.html", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(text, "<html>ui</html>");
    let (status, _, text) = call(app, "GET", "/api/families", "").await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(serde_json::from_str::<Value>(&text).unwrap().as_array().unwrap().len(), 7);
}

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use ighsom::http::router;
use ighsom::session::SessionStore;
use serde_json::{json, Value};
use tower::ServiceExt;

const CSV: &str = "no,lat,lon,alt,name,evaluation,comment
6,34.363369,132.470307,32.30,Oyster Street,2,A posh cafe is over there!
9,34.484011,132.269203,258.8,Fishing Lake,3,\"A peaceful fishing lake. After enjoying fishing, we must eat them.\"
10,34.484362,132.269326,272.6,Fishing Lake,4,I caught some fishes. 'Yamame' is delicate.
11,34.473791,132.240430,356.2,Rodge,1,Nice rodge in the mountain
13,34.367706,132.175777,357.5,Futae Yaki(Cake),4,Futae yaki is a local cake
16,34.388838,132.103882,575.7,Spa Rakan,4,Hot spring with a view
58,34.393745,132.436148,41.4,Game spot,3,Game center downtown
200,34.387643,132.430239,50.7,Tomato noodle,4,Tomato noodle is tasty
227,34.410682,133.197108,174.8,Onomichi,4,The seto sea is very beautiful.
241,34.393464,132.459653,52.3,High quality Japanese Restaurant,4,Expensive but good
";

async fn call(app: &Router, method: Method, uri: &str, body: Body) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri).body(body).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

async fn call_raw(app: &Router, method: Method, uri: &str, body: Body) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).body(body).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

fn json_body(v: Value) -> Body {
    Body::from(v.to_string())
}

async fn post_json(app: &Router, uri: &str, v: Value) -> (StatusCode, Value) {
    let req = Request::builder()
        .method(Method::POST)
        .uri(uri)
        .header("content-type", "application/json")
        .body(json_body(v))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

async fn new_session(app: &Router) -> String {
    let (status, v) = call(app, Method::POST, "/sessions", Body::empty()).await;
    assert_eq!(status, StatusCode::CREATED);
    v["id"].as_str().unwrap().to_string()
}

fn labels(node: &Value, out: &mut Vec<String>) {
    out.push(node["label"].as_str().unwrap().to_string());
    if let Some(units) = node["map"]["units"].as_array() {
        for u in units {
            labels(u, out);
        }
    }
}

#[tokio::test]
async fn full_workflow() {
    let app = router(Arc::new(SessionStore::new()));
    let id = new_session(&app).await;

    let (status, v) = call(&app, Method::POST, &format!("/sessions/{id}/data"), Body::from(CSV)).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["records"], 10);

    let docs: Vec<Value> = ["castle", "peace dome", "garden", "onomichi temple sea", "kure", "bridge", "takehara", "rabbit", "shrine sea"]
        .iter()
        .enumerate()
        .map(|(i, t)| json!({"id": format!("site{i}"), "text": t}))
        .collect();
    let (status, v) = post_json(&app, &format!("/sessions/{id}/corpus"), json!({ "documents": docs })).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    assert_eq!(v["documents"], 9);

    let (status, first) = post_json(&app, &format!("/sessions/{id}/train"), json!({"seed": 42})).await;
    assert_eq!(status, StatusCode::OK, "{first}");
    assert_eq!(first["params"]["tau1"], 0.1);
    assert_eq!(first["params"]["alpha"], 0.03);
    assert_eq!(first["root"]["count"], 10);
    let (_, again) = post_json(&app, &format!("/sessions/{id}/train"), json!({"seed": 42})).await;
    assert_eq!(again, first);

    let (status, h) = call(&app, Method::GET, &format!("/sessions/{id}/hierarchy"), Body::empty()).await;
    assert_eq!(status, StatusCode::OK);
    let mut all = Vec::new();
    labels(&h["root"], &mut all);
    for l in &all {
        assert!(l.parse::<ighsom::path::PathLabel>().is_ok(), "bad label {l}");
    }
    let color = h["root"]["map"]["units"][0]["color"].as_str().unwrap();
    assert!(color.len() == 7 && color.starts_with('#'));

    let (status, rows) = call(&app, Method::GET, &format!("/sessions/{id}/nodes/%5BR%5D%5B00%5D/samples"), Body::empty()).await;
    assert_eq!(status, StatusCode::OK);
    let want = h["root"]["map"]["units"][0]["count"].as_u64().unwrap();
    assert_eq!(rows.as_array().unwrap().len() as u64, want);

    let (status, r) = post_json(
        &app,
        &format!("/sessions/{id}/nodes/%5BR%5D%5B00%5D/refine"),
        json!({"seed": 3, "overrides": {"alpha": 1.0}}),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{r}");
    assert_eq!(r["hierarchy"]["depth"], 1);
    assert_eq!(r["report"]["scope"], "[R]");

    let (status, rules) = call(&app, Method::GET, &format!("/sessions/{id}/rules"), Body::empty()).await;
    assert_eq!(status, StatusCode::OK);
    assert!(!rules["rules"].as_array().unwrap().is_empty());

    let (status, f) = post_json(
        &app,
        &format!("/sessions/{id}/filter"),
        json!({"records": [{"id": 1, "lat": 34.3, "lon": 132.3, "alt": 1, "name": "x", "evaluation": 4, "comment": "hi"}]}),
    )
    .await;
    assert_eq!(status, StatusCode::OK, "{f}");
    assert_eq!(f["messages"].as_array().unwrap().len() + f["unmatched"].as_array().unwrap().len(), 1);

    let (status, snap) = call_raw(&app, Method::GET, &format!("/sessions/{id}/snapshot"), Body::empty()).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = call(&app, Method::PUT, &format!("/sessions/{id}/snapshot"), Body::from(snap.clone())).await;
    assert_eq!(status, StatusCode::OK);
    let (_, snap2) = call_raw(&app, Method::GET, &format!("/sessions/{id}/snapshot"), Body::empty()).await;
    assert_eq!(snap, snap2);

    let (status, audit) = call(&app, Method::GET, &format!("/sessions/{id}/audit"), Body::empty()).await;
    assert_eq!(status, StatusCode::OK);
    let kinds: Vec<&str> = audit.as_array().unwrap().iter().map(|e| e["event"].as_str().unwrap()).collect();
    assert_eq!(
        kinds,
        ["data_uploaded", "corpus_uploaded", "trained", "trained", "refined", "rules_extracted", "snapshot_imported"]
    );
}

#[tokio::test]
async fn error_statuses() {
    let app = router(Arc::new(SessionStore::new()));
    let (status, _) = call(&app, Method::GET, "/sessions/nope/hierarchy", Body::empty()).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let id = new_session(&app).await;
    let (status, _) = post_json(&app, &format!("/sessions/{id}/train"), json!({"seed": 1})).await;
    assert_eq!(status, StatusCode::PRECONDITION_FAILED);

    let bad = CSV.replace("Rodge,1,", "Rodge,9,");
    let (status, v) = call(&app, Method::POST, &format!("/sessions/{id}/data"), Body::from(bad)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(v["line"], 5);

    call(&app, Method::POST, &format!("/sessions/{id}/data"), Body::from(CSV)).await;
    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}/rules"), Body::empty()).await;
    assert_eq!(status, StatusCode::PRECONDITION_FAILED);
    let (status, _) = call(&app, Method::GET, &format!("/sessions/{id}/snapshot"), Body::empty()).await;
    assert_eq!(status, StatusCode::PRECONDITION_FAILED);

    post_json(&app, &format!("/sessions/{id}/train"), json!({"seed": 1})).await;
    let (status, _) = post_json(&app, &format!("/sessions/{id}/nodes/%5BR%5D%5B99%5D/refine"), json!({"seed": 1})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = post_json(&app, &format!("/sessions/{id}/nodes/R11/refine"), json!({"seed": 1})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = post_json(&app, &format!("/sessions/{id}/nodes/%5BR%5D/refine"), json!({})).await;
    assert!(status.is_client_error(), "seed must be mandatory");

    let (_, snap) = call_raw(&app, Method::GET, &format!("/sessions/{id}/snapshot"), Body::empty()).await;
    let other = new_session(&app).await;
    let fewer: String = CSV.lines().take(8).map(|l| format!("{l}\n")).collect();
    call(&app, Method::POST, &format!("/sessions/{other}/data"), Body::from(fewer)).await;
    let (status, v) = call(&app, Method::PUT, &format!("/sessions/{other}/snapshot"), Body::from(snap)).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert!(v["expected"].is_string() && v["found"].is_string());
}

#[tokio::test(flavor = "multi_thread", worker_threads = 2)]
async fn concurrent_writer_gets_conflict() {
    let store = Arc::new(SessionStore::new());
    let app = router(store.clone());
    let id = new_session(&app).await;
    let mut csv = String::from("no,lat,lon,alt,name,evaluation,comment\n");
    for i in 0..3000 {
        let k = (i % 7) as f64;
        csv.push_str(&format!("{},{},{},{},n{},{},c\n", i + 1, 34.0 + k * 0.1 + (i as f64 * 0.013).sin() * 0.03, 132.0 + k * 0.2, k * 10.0, i % 7, i % 5));
    }
    call(&app, Method::POST, &format!("/sessions/{id}/data"), Body::from(csv)).await;

    let session = store.get(&id).unwrap();
    let train = {
        let app = app.clone();
        let id = id.clone();
        tokio::spawn(async move {
            post_json(&app, &format!("/sessions/{id}/train"), json!({"seed": 5, "params": {"lambda": 400}})).await
        })
    };
    while !session.is_busy() && !train.is_finished() {
        tokio::task::yield_now().await;
    }
    // The first train runs for a good fraction of a second on this input.
    assert!(session.is_busy(), "first train finished before it could be observed");
    let (status, _) = post_json(&app, &format!("/sessions/{id}/train"), json!({"seed": 6})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (first, _) = train.await.unwrap();
    assert_eq!(first, StatusCode::OK);
    // Readers see the complete result of the first train.
    let (status, h) = call(&app, Method::GET, &format!("/sessions/{id}/hierarchy"), Body::empty()).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(h["root"]["count"], 3000);
}

use std::sync::Arc;

use abalone_core::canonical::canonicalize;
use abalone_core::{solve, Constellation, GameConfig, SolveOptions};
use abalone_service::{router, AppState, MovesView, SessionView};
use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn app_with(shapes: &[&str]) -> AppState {
    AppState::new(shapes.iter().map(|s| {
        let config = GameConfig::preset(s.parse().unwrap()).unwrap();
        solve(&config, &SolveOptions::default()).unwrap()
    }))
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let request = Request::builder().method(method).uri(uri);
    let request = match body {
        Some(b) => request
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => request.body(Body::empty()),
    }
    .unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes).unwrap_or(Value::Null);
    (status, value)
}

fn form(shape: &str, notation: &str) -> u128 {
    let (board, c) = Constellation::parse(&format!("{shape}:{notation}")).unwrap();
    canonicalize(&board, &c, false).key()
}

#[tokio::test]
async fn black_opening_moves_are_annotated() {
    let app = router(Arc::new(app_with(&["2,2,3"])));
    let (status, created) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({"shape": "2,2,3", "human": "black"})),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    let session: SessionView = serde_json::from_value(created).unwrap();
    assert_eq!(session.cells, "G.BG..BG.B");
    assert_eq!(session.outcome_class, "D");
    assert_eq!(session.status, abalone_service::Status::InProgress);

    let (status, moves) = call(
        &app,
        "GET",
        &format!("/sessions/{}/moves", session.id),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let moves: MovesView = serde_json::from_value(moves).unwrap();
    let c1 = form("2,2,3", "G.BG.BBG..");
    for m in &moves.moves {
        let cells = m.result.split_once(':').unwrap().1;
        if form("2,2,3", cells) == c1 {
            assert_eq!(m.value, "Draw", "{}", m.text);
        } else {
            assert_eq!(m.value, "GrayWin", "{}", m.text);
        }
    }
    assert!(moves.moves.iter().any(|m| m.value == "Draw"));

    // play a drawing move, then let the engine answer with C2 or C3
    let draw = moves.moves.iter().find(|m| m.value == "Draw").unwrap();
    let uri = format!("/sessions/{}/moves", session.id);
    let (status, _) = call(&app, "POST", &uri, Some(json!({"move": draw.text}))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, after) = call(
        &app,
        "POST",
        &format!("/sessions/{}/engine-move", session.id),
        None,
    )
    .await;
    assert_eq!(status, StatusCode::OK);
    let after: SessionView = serde_json::from_value(after).unwrap();
    let reply = form("2,2,3", &after.cells);
    assert!(reply == form("2,2,3", "G.BGGBB...") || reply == form("2,2,3", "..BGGBBG.."));
    assert_eq!(after.history.len(), 2);
    assert!(after.history[1].by_engine);
}

#[tokio::test]
async fn engine_at_b0_forces_b11() {
    let app = router(Arc::new(app_with(&["2,2,2"])));
    let (_, created) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({"shape": "2,2,2", "human": "gray", "start": "BB...GG"})),
    )
    .await;
    let id = created["id"].as_str().unwrap().to_string();
    assert_eq!(created["outcome_class"], "N");
    let (status, after) = call(&app, "POST", &format!("/sessions/{id}/engine-move"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(
        form("2,2,2", after["cells"].as_str().unwrap()),
        form("2,2,2", "GBGB...")
    );
    assert_eq!(after["outcome_class"], "L");
    assert_eq!(after["value"]["outcome"], "BlackWin");
}

#[tokio::test]
async fn error_statuses() {
    let app = router(Arc::new(app_with(&["2,2,3"])));
    let (status, _) = call(&app, "GET", "/sessions/999", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "POST", "/sessions/999/engine-move", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, body) = call(&app, "POST", "/sessions", Some(json!({"shape": "2,2,2"}))).await;
    assert_eq!(status, StatusCode::SERVICE_UNAVAILABLE);
    assert!(body["error"].as_str().unwrap().contains("2,2,2"));

    let (status, _) = call(&app, "POST", "/sessions", Some(json!({"shape": "0,2,2"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (_, created) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({"shape": "2,2,3", "human": "gray"})),
    )
    .await;
    let id = created["id"].as_str().unwrap().to_string();
    // Black (the engine) moves first: a human move now is out of turn
    let uri = format!("/sessions/{id}/moves");
    let (status, _) = call(&app, "POST", &uri, Some(json!({"move": "d:up"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (_, unchanged) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(unchanged, created);

    call(&app, "POST", &format!("/sessions/{id}/engine-move"), None).await;
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/engine-move"), None).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) = call(&app, "POST", &uri, Some(json!({"move": "a:down-left"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn game_ends_with_a_winner_or_the_ply_cap() {
    let app = router(Arc::new(app_with(&["2,2,3"])));
    // C0 with Black to move: pick a losing move and let the engine finish
    let (_, created) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({"shape": "2,2,3", "human": "black"})),
    )
    .await;
    let id = created["id"].as_str().unwrap().to_string();
    let (_, moves) = call(&app, "GET", &format!("/sessions/{id}/moves"), None).await;
    let moves: MovesView = serde_json::from_value(moves).unwrap();
    let losing = moves.moves.iter().find(|m| m.value == "GrayWin").unwrap();
    let mut state: SessionView = {
        let uri = format!("/sessions/{id}/moves");
        let (_, v) = call(&app, "POST", &uri, Some(json!({"move": losing.text}))).await;
        serde_json::from_value(v).unwrap()
    };
    let mut value = state.value.distance.unwrap();
    while state.status == abalone_service::Status::InProgress {
        if state.to_move == "gray" {
            let (_, v) = call(&app, "POST", &format!("/sessions/{id}/engine-move"), None).await;
            state = serde_json::from_value(v).unwrap();
        } else {
            // Black plays its most stubborn defence
            let (_, m) = call(&app, "GET", &format!("/sessions/{id}/moves"), None).await;
            let m: MovesView = serde_json::from_value(m).unwrap();
            let uri = format!("/sessions/{id}/moves");
            let (_, v) = call(&app, "POST", &uri, Some(json!({"move": m.moves[0].text}))).await;
            state = serde_json::from_value(v).unwrap();
        }
        assert_eq!(
            state.value.outcome, "GrayWin",
            "engine never gives up a win"
        );
        let d = state.value.distance.unwrap();
        assert!(d < value);
        value = d;
    }
    assert_eq!(state.status, abalone_service::Status::GrayWins);
    assert_eq!(state.winner.as_deref(), Some("gray"));

    let (_, capped) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({"shape": "2,2,3", "human": "gray", "ply_cap": 1})),
    )
    .await;
    let id = capped["id"].as_str().unwrap().to_string();
    let (_, v) = call(&app, "POST", &format!("/sessions/{id}/engine-move"), None).await;
    assert_eq!(v["status"], "draw-by-cap");
}

#[tokio::test]
async fn sessions_survive_a_restart_through_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.json");
    let first = Arc::new(app_with(&["2,2,3"]).with_snapshot(path.clone()).unwrap());
    let app = router(first);
    let (_, created) = call(
        &app,
        "POST",
        "/sessions",
        Some(json!({"shape": "2,2,3", "human": "gray"})),
    )
    .await;
    let id = created["id"].as_str().unwrap().to_string();
    let (_, played) = call(&app, "POST", &format!("/sessions/{id}/engine-move"), None).await;

    let second = Arc::new(app_with(&["2,2,3"]).with_snapshot(path).unwrap());
    let app = router(second);
    let (status, restored) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(restored, played);
    let (_, next) = call(&app, "POST", "/sessions", Some(json!({"shape": "2,2,3"}))).await;
    assert_ne!(next["id"], restored["id"]);
}

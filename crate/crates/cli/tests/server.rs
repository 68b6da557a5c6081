//! Session server driven over HTTP.

mod support;

use serde_json::{json, Value};

use support::{spawn_server, Client};

fn client() -> Client {
    Client::new(spawn_server())
}

#[test]
fn create_returns_distinct_ids() {
    let c = client();
    let a = c.create(json!({}));
    let b = c.create(json!({"mode": "train"}));
    assert_ne!(a, b);
}

#[test]
fn fresh_state_document() {
    let c = client();
    let id = c.create(json!({}));
    let (status, s) = c.get(&format!("/sessions/{id}/state"));
    assert_eq!(status, 200);
    assert_eq!(s["status"], "paused");
    assert_eq!(s["position"], json!([0, 0]));
    assert_eq!(s["position"], s["cells"]["start"]);
    assert_eq!(s["strategy"], "EXPLORE");
    assert_eq!(s["grid"], json!({"width": 8, "height": 8}));
    assert_eq!(s["flags"], json!({"x": false, "y": false, "z": false}));
    assert_eq!(s["epsilon"], 1.0);
    assert_eq!(s["step_log_len"], 0);
    assert_eq!(s["cells"]["hazards"], json!([]));
    assert_eq!(s["cells"]["points_of_interest"], json!([]));
    assert_eq!(s["potentials"], json!([]));
    for key in ["last_events", "metrics", "trajectory", "mode", "kind", "attention"] {
        assert!(s.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn advance_appends_to_the_step_log() {
    let c = client();
    let id = c.create(json!({"seed": 4}));
    let (status, v) = c.post(&format!("/sessions/{id}/advance"), json!({"steps": 5}));
    assert_eq!(status, 200);
    assert_eq!(v["executed"], 5);
    assert_eq!(v["state"]["step_log_len"], 5);
    assert_eq!(c.get(&format!("/sessions/{id}/state")).1["step_log_len"], 5);
}

#[test]
fn hazards_stay_hidden_until_reported() {
    let c = client();
    let id = c.create(json!({"seed": 1}));
    // one step from the start cannot reach an information point
    let (_, v) = c.post(&format!("/sessions/{id}/advance"), json!({"steps": 1}));
    assert_eq!(v["state"]["cells"]["hazards"], json!([]));
    let (_, preview) = c.post(&format!("/sessions/{id}/verbal"), json!({"text": "hello"}));
    assert_eq!(preview["records"], json!([]));
    c.post(&format!("/sessions/{id}/advance"), json!({"steps": 1}));
    let s = c.get(&format!("/sessions/{id}/state")).1;
    assert_eq!(s["cells"]["hazards"], json!([[6, 5], [7, 5]]));
    assert_eq!(s["cells"]["points_of_interest"], json!([[5, 6]]));
}

#[test]
fn verbal_preview_and_potential() {
    let c = client();
    let id = c.create(json!({}));
    let (status, preview) = c.post(&format!("/sessions/{id}/verbal"), json!({"text": "There is fire near the old warehouse"}));
    assert_eq!(status, 200);
    let records = preview["records"].as_array().unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0]["info_type"], "Z");
    assert_eq!(records[0]["polarity"], "avoid");
    assert_eq!(records[0]["cells"], json!([[6, 5]]));
    assert_eq!(c.get(&format!("/sessions/{id}/state")).1["pending_verbal"], 1);

    c.post(&format!("/sessions/{id}/advance"), json!({"steps": 1}));
    let s = c.get(&format!("/sessions/{id}/state")).1;
    assert_eq!(s["pending_verbal"], 0);
    assert_eq!(s["potentials"], json!([{"cell": [6, 5], "value": -100.0}]));
}

#[test]
fn error_statuses() {
    let c = client();
    let dir = tempfile::tempdir().unwrap();

    // unknown session
    assert_eq!(c.get("/sessions/nope/state").0, 404);
    assert_eq!(c.post("/sessions/nope/verbal", json!({"text": "fire"})).0, 404);
    assert_eq!(c.post("/sessions/nope/advance", json!({"steps": 1})).0, 404);

    // corrupt map: start on an obstacle
    let bad = dir.path().join("bad.json");
    let mut map: Value = serde_json::from_str(include_str!("../../../maps/default_map.json")).unwrap();
    map["obstacles"] = json!([[0, 0]]);
    std::fs::write(&bad, map.to_string()).unwrap();
    let (status, body) = c.post("/sessions", json!({"map": bad}));
    assert_eq!(status, 400, "{body}");
    assert_eq!(body["invariant"], "start_clear");

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{").unwrap();
    let (status, body) = c.post("/sessions", json!({"map": garbage}));
    assert_eq!(status, 400);
    assert_eq!(body["invariant"], "well_formed");

    // kb pointing off the map
    let kb = dir.path().join("kb.json");
    std::fs::write(&kb, r#"{"landmarks":{"far":[[9,9]]},"type_keywords":{}}"#).unwrap();
    let (status, body) = c.post("/sessions", json!({"kb": kb}));
    assert_eq!(status, 400);
    assert_eq!(body["invariant"], "landmarks_in_bounds");

    // missing tables
    assert_eq!(c.post("/sessions", json!({"mode": "replay_greedy"})).0, 404);
    assert_eq!(c.post("/sessions", json!({"mode": "replay_greedy", "tables": dir.path().join("none.bin")})).0, 404);

    // empty text
    let id = c.create(json!({}));
    assert_eq!(c.post(&format!("/sessions/{id}/verbal"), json!({"text": "   "})).0, 422);
    assert_eq!(c.post(&format!("/sessions/{id}/verbal"), json!({})).0, 422);
}

#[test]
fn advancing_a_finished_episode_conflicts() {
    let c = client();
    let dir = tempfile::tempdir().unwrap();
    let short = dir.path().join("short.json");
    let mut map: Value = serde_json::from_str(include_str!("../../../maps/default_map.json")).unwrap();
    map["max_steps"] = json!(4);
    std::fs::write(&short, map.to_string()).unwrap();
    let id = c.create(json!({"map": short}));
    let (_, v) = c.post(&format!("/sessions/{id}/advance"), json!({"steps": 100}));
    assert_eq!(v["executed"], 4);
    assert_eq!(v["state"]["status"], "done");
    assert_eq!(c.post(&format!("/sessions/{id}/advance"), json!({"steps": 1})).0, 409);
    assert_eq!(c.post(&format!("/sessions/{id}/verbal"), json!({"text": "fire at (1,1)"})).0, 409);
    assert_eq!(c.get(&format!("/sessions/{id}/state")).0, 200);
}

#[test]
fn json_field_names_are_snake_case() {
    fn check(v: &Value) {
        match v {
            Value::Object(m) => {
                for (k, v) in m {
                    assert!(k.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'), "key {k}");
                    check(v);
                }
            }
            Value::Array(a) => a.iter().for_each(check),
            _ => {}
        }
    }
    let c = client();
    let id = c.create(json!({}));
    c.post(&format!("/sessions/{id}/verbal"), json!({"text": "Smoke at (2,2)"}));
    check(&c.post(&format!("/sessions/{id}/advance"), json!({"steps": 30})).1);
}

#[test]
fn concurrent_requests_on_one_session_serialize() {
    let base = spawn_server();
    let id = Client::new(base.clone()).create(json!({"seed": 2}));
    let handles: Vec<_> = (0..8)
        .map(|_| {
            let (base, id) = (base.clone(), id.clone());
            std::thread::spawn(move || {
                let c = Client::new(base);
                c.post(&format!("/sessions/{id}/advance"), json!({"steps": 5}));
                c.get(&format!("/sessions/{id}/state")).1
            })
        })
        .collect();
    for h in handles {
        let s = h.join().unwrap();
        let len = s["step_log_len"].as_u64().unwrap();
        assert_eq!(s["trajectory"].as_array().unwrap().len() as u64, len + 1);
    }
    let s = Client::new(base).get(&format!("/sessions/{id}/state")).1;
    assert_eq!(s["step_log_len"], 40);
}

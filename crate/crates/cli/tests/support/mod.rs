#![allow(dead_code)]

use std::net::SocketAddr;
use std::sync::mpsc;
use std::thread;

use serde_json::Value;

/// Starts a session server on an ephemeral port in a background thread.
pub fn spawn_server() -> String {
    let (tx, rx) = mpsc::channel::<SocketAddr>();
    thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            sarhrl::server::serve(listener).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

/// Headless client that reports every status code instead of erroring.
pub struct Client {
    base: String,
    agent: ureq::Agent,
}

impl Client {
    pub fn new(base: String) -> Self {
        let agent = ureq::Agent::config_builder().http_status_as_error(false).build().into();
        Self { base, agent }
    }

    pub fn post(&self, path: &str, body: Value) -> (u16, Value) {
        let mut resp = self.agent.post(&format!("{}{path}", self.base)).send_json(body).unwrap();
        let status = resp.status().as_u16();
        (status, resp.body_mut().read_json().unwrap_or(Value::Null))
    }

    pub fn get(&self, path: &str) -> (u16, Value) {
        let mut resp = self.agent.get(&format!("{}{path}", self.base)).call().unwrap();
        let status = resp.status().as_u16();
        (status, resp.body_mut().read_json().unwrap_or(Value::Null))
    }

    pub fn create(&self, body: Value) -> String {
        let (status, v) = self.post("/sessions", body);
        assert_eq!(status, 200, "{v}");
        v["session_id"].as_str().unwrap().to_owned()
    }
}

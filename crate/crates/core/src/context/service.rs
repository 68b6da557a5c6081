use std::sync::Mutex;
use std::time::Duration;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::grammar::{extract_context, ground_landmark, Extraction};
use super::kb::{Category, KnowledgeBase};
use super::{ContextRecord, Polarity, Provenance, RecordType, VerbalInput};
use crate::env::Cell;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("extractor service unreachable: {0}")]
    Transport(String),
    #[error("extractor service replied with a malformed body: {0}")]
    Malformed(String),
    #[error("no extractor endpoint configured")]
    NotConfigured,
}

/// Request body sent to the extraction service.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceRequest {
    pub text: String,
    pub landmarks: Vec<String>,
    pub keywords: IndexMap<Category, Vec<String>>,
}

impl ServiceRequest {
    pub fn new(text: &str, kb: &KnowledgeBase) -> Self {
        Self {
            text: text.to_owned(),
            landmarks: kb.landmarks().iter().map(|(p, _)| p.clone()).collect(),
            keywords: kb.keywords().iter().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceRecord {
    #[serde(rename = "type")]
    pub kind: String,
    pub location: String,
    pub polarity: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceReply {
    pub records: Vec<ServiceRecord>,
}

/// Anything that can turn a [`ServiceRequest`] into a reply. Implemented by
/// the HTTP client; tests substitute in-process stubs.
pub trait ExtractorService {
    fn request(&self, req: &ServiceRequest) -> Result<ServiceReply, ServiceError>;
}

/// Endpoint and timeout for the extraction service.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractorConfig {
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
}

fn default_timeout_ms() -> u64 {
    2000
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        Self { endpoint: None, timeout_ms: default_timeout_ms() }
    }
}

impl ExtractorConfig {
    /// Applies `SARHRL_EXTRACTOR_ENDPOINT` / `SARHRL_EXTRACTOR_TIMEOUT_MS`
    /// on top of `self`.
    pub fn with_env(mut self) -> Self {
        if let Ok(ep) = std::env::var("SARHRL_EXTRACTOR_ENDPOINT") {
            if !ep.trim().is_empty() {
                self.endpoint = Some(ep);
            }
        }
        if let Some(ms) = std::env::var("SARHRL_EXTRACTOR_TIMEOUT_MS").ok().and_then(|v| v.parse().ok()) {
            self.timeout_ms = ms;
        }
        self
    }
}

/// Blocking JSON-over-HTTP client. Requests are serialized: one in flight at
/// a time.
pub struct HttpExtractorClient {
    endpoint: String,
    agent: ureq::Agent,
    in_flight: Mutex<()>,
}

impl HttpExtractorClient {
    pub fn new(config: &ExtractorConfig) -> Result<Self, ServiceError> {
        let endpoint = config.endpoint.clone().ok_or(ServiceError::NotConfigured)?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .build()
            .into();
        Ok(Self { endpoint, agent, in_flight: Mutex::new(()) })
    }
}

impl ExtractorService for HttpExtractorClient {
    fn request(&self, req: &ServiceRequest) -> Result<ServiceReply, ServiceError> {
        let _guard = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        let mut resp = self.agent.post(&self.endpoint).send_json(req).map_err(|e| ServiceError::Transport(e.to_string()))?;
        resp.body_mut().read_json::<ServiceReply>().map_err(|e| ServiceError::Malformed(e.to_string()))
    }
}

fn parse_type(kind: &str) -> Option<RecordType> {
    match kind.trim().to_lowercase().as_str() {
        "hazard" | "z" => Some(RecordType::Z),
        "victim" | "x" => Some(RecordType::X),
        "route" | "y" => Some(RecordType::Y),
        "poi" | "point_of_interest" | "point of interest" => Some(RecordType::Poi),
        _ => None,
    }
}

fn parse_polarity(p: &str) -> Option<Polarity> {
    match p.trim().to_lowercase().as_str() {
        "avoid" => Some(Polarity::Avoid),
        "seek" => Some(Polarity::Seek),
        _ => None,
    }
}

fn ground_location(location: &str, kb: &KnowledgeBase) -> Vec<Cell> {
    let cells = ground_landmark(location, kb);
    if !cells.is_empty() {
        return cells;
    }
    let digits: Vec<usize> = location
        .split(|c: char| !c.is_ascii_digit())
        .filter(|s| !s.is_empty())
        .filter_map(|s| s.parse().ok())
        .collect();
    match digits[..] {
        [row, col] if location.contains('(') && kb.cell_allowed(Cell::new(row, col)) => vec![Cell::new(row, col)],
        _ => Vec::new(),
    }
}

/// Service-backed extraction. Every returned triple is re-grounded through
/// the knowledge base and checked against the polarity table; failures are
/// dropped. Transport errors and malformed replies fall back to the grammar.
pub fn llm_extract(input: &VerbalInput, kb: &KnowledgeBase, client: &dyn ExtractorService) -> Extraction {
    let reply = match client.request(&ServiceRequest::new(&input.text, kb)) {
        Ok(reply) => reply,
        Err(e) => {
            let mut out = extract_context(input, kb);
            out.notes.push(format!("{e}; used the grammar backend"));
            return out;
        }
    };
    let mut out = Extraction::default();
    for triple in reply.records {
        let (Some(info_type), Some(polarity)) = (parse_type(&triple.kind), parse_polarity(&triple.polarity)) else {
            out.notes.push(format!("dropped triple with unknown type/polarity: {triple:?}"));
            continue;
        };
        let cells = ground_location(&triple.location, kb);
        if cells.is_empty() {
            out.notes.push(format!("dropped triple: `{}` is not a known landmark or on-map coordinate", triple.location));
            continue;
        }
        let record = ContextRecord { info_type, cells, polarity, provenance: Provenance::Llm, source_text: input.text.clone() };
        if !record.polarity_is_consistent() {
            out.notes.push(format!("dropped triple: {info_type} cannot have polarity {polarity:?}"));
            continue;
        }
        out.records.push(record);
    }
    if out.records.is_empty() {
        out.notes.push("service reply validated to zero records".to_owned());
    }
    out
}

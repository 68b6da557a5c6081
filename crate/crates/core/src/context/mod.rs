//! Verbal input -> grounded context records.
//!
//! Two interchangeable backends produce [`ContextRecord`]s: a deterministic
//! keyword grammar ([`extract_context`]) and an external extraction service
//! ([`llm_extract`]) whose replies are re-grounded through the same
//! knowledge base, falling back to the grammar on any failure.

mod extractor;
mod grammar;
mod info_space;
mod kb;
mod service;

pub use extractor::ContextExtractor;
pub use grammar::{extract_context, ground_landmark, Extraction};
pub use info_space::{next_required_info, InfoSpaceError, InformationSpace};
pub use kb::{Category, KbError, KnowledgeBase};
pub use service::{llm_extract, ExtractorConfig, ExtractorService, HttpExtractorClient, ServiceError, ServiceRecord, ServiceReply, ServiceRequest};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::env::Cell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerbalSource {
    Scripted,
    Human,
}

/// A piece of free-form information addressed to the agent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerbalInput {
    pub text: String,
    pub source: VerbalSource,
    pub episode_step: usize,
}

impl VerbalInput {
    /// Rejects text that is empty after trimming.
    pub fn new(text: impl Into<String>, source: VerbalSource, episode_step: usize) -> Option<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            None
        } else {
            Some(Self { text, source, episode_step })
        }
    }
}

/// Kind of information a record carries. X/Y/Z follow the information space
/// (victim details, navigation routes, environmental hazards).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RecordType {
    X,
    Y,
    Z,
    #[serde(rename = "poi")]
    Poi,
}

impl fmt::Display for RecordType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordType::X => "X",
            RecordType::Y => "Y",
            RecordType::Z => "Z",
            RecordType::Poi => "poi",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Avoid,
    Seek,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Grammar,
    Llm,
}

/// Grounded output of the context extractor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextRecord {
    pub info_type: RecordType,
    pub cells: Vec<Cell>,
    pub polarity: Polarity,
    pub provenance: Provenance,
    pub source_text: String,
}

impl ContextRecord {
    /// Whether the (type, polarity) pair is one the classification table can
    /// produce: hazards are avoided, victims and POIs sought, routes either.
    pub fn polarity_is_consistent(&self) -> bool {
        match self.info_type {
            RecordType::Z => self.polarity == Polarity::Avoid,
            RecordType::X | RecordType::Poi => self.polarity == Polarity::Seek,
            RecordType::Y => true,
        }
    }
}

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{Cell, GridWorld};

#[derive(Debug, Error)]
pub enum KbError {
    #[error("cannot open knowledge base {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed knowledge base: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("landmark phrase `{0}` is duplicated after lowercasing")]
    DuplicateLandmark(String),
    #[error("landmark `{phrase}` maps to {cell}, outside the {width}x{height} map")]
    OutOfBounds { phrase: String, cell: Cell, width: usize, height: usize },
    #[error("landmark `{0}` has no cells")]
    EmptyLandmark(String),
}

impl KbError {
    /// Short name of the violated invariant, for error payloads.
    pub fn invariant(&self) -> &'static str {
        match self {
            KbError::Io { .. } => "readable",
            KbError::Parse(_) => "well_formed",
            KbError::DuplicateLandmark(_) => "unique_landmarks",
            KbError::OutOfBounds { .. } => "landmarks_in_bounds",
            KbError::EmptyLandmark(_) => "non_empty_landmarks",
        }
    }
}

/// Keyword categories used for classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Hazard,
    Victim,
    Route,
    Poi,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct KbFile {
    landmarks: IndexMap<String, Vec<Cell>>,
    type_keywords: IndexMap<Category, Vec<String>>,
}

/// Landmark phrases mapped to cells, plus trigger phrases per category.
/// Immutable after load; phrases are stored lowercased in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    landmarks: Vec<(String, Vec<Cell>)>,
    keywords: Vec<(Category, Vec<String>)>,
    bounds: Option<(usize, usize)>,
}

const DEFAULT_KB: &str = include_str!("../../../../kb/default_kb.json");

impl KnowledgeBase {
    /// The shipped knowledge base, validated against the shipped map.
    pub fn default_kb() -> Self {
        Self::from_json(DEFAULT_KB, Some(&GridWorld::default_map())).expect("shipped kb is valid")
    }

    /// The shipped knowledge base validated against another map.
    pub fn default_for(world: &GridWorld) -> Result<Self, KbError> {
        Self::from_json(DEFAULT_KB, Some(world))
    }

    pub fn load(path: impl AsRef<Path>, world: Option<&GridWorld>) -> Result<Self, KbError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| KbError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text, world)
    }

    pub fn from_json(text: &str, world: Option<&GridWorld>) -> Result<Self, KbError> {
        let file: KbFile = serde_json::from_str(text)?;
        Self::from_parts(
            file.landmarks.into_iter().collect(),
            file.type_keywords.into_iter().collect(),
            world,
        )
    }

    /// Builds and validates a knowledge base. When `world` is given, every
    /// landmark cell must lie on it and coordinate mentions are later
    /// restricted to its bounds.
    pub fn from_parts(
        landmarks: Vec<(String, Vec<Cell>)>,
        keywords: Vec<(Category, Vec<String>)>,
        world: Option<&GridWorld>,
    ) -> Result<Self, KbError> {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(landmarks.len());
        for (phrase, cells) in landmarks {
            let norm = normalize(&phrase);
            if !seen.insert(norm.clone()) {
                return Err(KbError::DuplicateLandmark(norm));
            }
            if cells.is_empty() {
                return Err(KbError::EmptyLandmark(norm));
            }
            if let Some(w) = world {
                if let Some(&cell) = cells.iter().find(|c| !w.in_bounds(**c)) {
                    return Err(KbError::OutOfBounds { phrase: norm, cell, width: w.width(), height: w.height() });
                }
            }
            out.push((norm, cells));
        }
        let keywords = keywords
            .into_iter()
            .map(|(cat, words)| (cat, words.iter().map(|w| normalize(w)).filter(|w| !w.is_empty()).collect()))
            .collect();
        Ok(Self { landmarks: out, keywords, bounds: world.map(|w| (w.width(), w.height())) })
    }

    pub fn landmarks(&self) -> &[(String, Vec<Cell>)] {
        &self.landmarks
    }

    pub fn keywords(&self) -> &[(Category, Vec<String>)] {
        &self.keywords
    }

    pub fn keywords_for(&self, category: Category) -> &[String] {
        self.keywords.iter().find(|(c, _)| *c == category).map(|(_, w)| w.as_slice()).unwrap_or(&[])
    }

    /// `(width, height)` of the companion map, if validated against one.
    pub fn bounds(&self) -> Option<(usize, usize)> {
        self.bounds
    }

    pub fn cell_allowed(&self, cell: Cell) -> bool {
        self.bounds.is_none_or(|(w, h)| cell.row < h && cell.col < w)
    }
}

/// Lowercase and collapse to single-space separated alphanumeric tokens.
pub(crate) fn normalize(text: &str) -> String {
    tokens(text).join(" ")
}

pub(crate) fn tokens(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

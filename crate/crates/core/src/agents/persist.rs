//! Binary table dump: an 8-byte magic, a little-endian `u64` header length,
//! a JSON header, then every table's values as little-endian `f64` in row
//! order.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{Action, GridWorld, RewardMode};

use super::{Agent, AgentKind, QTable};

const MAGIC: &[u8; 8] = b"SARHRLQ1";

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("not a table file (bad magic)")]
    BadMagic,
    #[error("truncated table file")]
    Truncated,
    #[error("malformed header: {0}")]
    Header(#[from] serde_json::Error),
    #[error("tables were trained on map {found}, not {expected}")]
    MapMismatch { expected: String, found: String },
    #[error("unknown action label `{0}`")]
    UnknownAction(String),
    #[error("table shape does not match the map or agent kind")]
    Shape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableMeta {
    pub states: usize,
    pub actions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TablesHeader {
    pub map_hash: String,
    pub kind: AgentKind,
    pub attention: bool,
    pub reward_mode: RewardMode,
    pub tables: Vec<TableMeta>,
}

pub fn to_bytes(agent: &Agent, world: &GridWorld, attention: bool, reward_mode: RewardMode) -> Vec<u8> {
    let header = TablesHeader {
        map_hash: world.content_hash(),
        kind: agent.kind(),
        attention,
        reward_mode,
        tables: agent
            .tables()
            .iter()
            .map(|t| TableMeta { states: t.states(), actions: t.actions().iter().map(|a| a.label().to_owned()).collect() })
            .collect(),
    };
    let json = serde_json::to_vec(&header).expect("header serializes");
    let mut out = Vec::with_capacity(16 + json.len() + agent.tables().iter().map(|t| t.values().len() * 8).sum::<usize>());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(json.len() as u64).to_le_bytes());
    out.extend_from_slice(&json);
    for table in agent.tables() {
        for v in table.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Decodes a dump, rejecting it unless it was trained on `world`.
pub fn from_bytes(bytes: &[u8], world: &GridWorld) -> Result<(TablesHeader, Agent), PersistError> {
    if bytes.len() < 16 {
        return Err(PersistError::Truncated);
    }
    if &bytes[..8] != MAGIC {
        return Err(PersistError::BadMagic);
    }
    let len = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")) as usize;
    let body = &bytes[16..];
    if body.len() < len {
        return Err(PersistError::Truncated);
    }
    let header: TablesHeader = serde_json::from_slice(&body[..len])?;
    let expected = world.content_hash();
    if header.map_hash != expected {
        return Err(PersistError::MapMismatch { expected, found: header.map_hash });
    }

    let mut values = body[len..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")));
    let mut tables = Vec::with_capacity(header.tables.len());
    for meta in &header.tables {
        if meta.states != world.state_count() {
            return Err(PersistError::Shape);
        }
        let actions = meta
            .actions
            .iter()
            .map(|l| Action::from_label(l).ok_or_else(|| PersistError::UnknownAction(l.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let n = meta.states * actions.len();
        let vals: Vec<f64> = values.by_ref().take(n).collect();
        if vals.len() != n {
            return Err(PersistError::Truncated);
        }
        tables.push(QTable::from_values(meta.states, actions, vals).ok_or(PersistError::Shape)?);
    }
    if values.next().is_some() {
        return Err(PersistError::Shape);
    }
    let fresh = Agent::new(header.kind, world);
    let shapes_match = fresh.tables().len() == tables.len()
        && fresh.tables().iter().zip(&tables).all(|(a, b)| a.actions() == b.actions());
    if !shapes_match {
        return Err(PersistError::Shape);
    }
    Ok((header.clone(), Agent::from_tables(header.kind, tables)))
}

pub fn save(path: &Path, agent: &Agent, world: &GridWorld, attention: bool, reward_mode: RewardMode) -> Result<(), PersistError> {
    fs::write(path, to_bytes(agent, world, attention, reward_mode)).map_err(|source| PersistError::Io { path: path.to_owned(), source })
}

pub fn load(path: &Path, world: &GridWorld) -> Result<(TablesHeader, Agent), PersistError> {
    let bytes = fs::read(path).map_err(|source| PersistError::Io { path: path.to_owned(), source })?;
    from_bytes(&bytes, world)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::MapFile;

    fn trained(kind: AgentKind, world: &GridWorld) -> Agent {
        let mut agent = Agent::new(kind, world);
        for (t, table) in agent.tables_mut().iter_mut().enumerate() {
            for s in 0..table.states() {
                for a in 0..table.actions().len() {
                    table.set(s, a, (s * 31 + a * 7 + t) as f64 * 0.25 - 3.0);
                }
            }
        }
        agent
    }

    #[test]
    fn round_trip_both_kinds() {
        let w = GridWorld::default_map();
        for kind in [AgentKind::Flat, AgentKind::Hierarchical] {
            let agent = trained(kind, &w);
            let bytes = to_bytes(&agent, &w, true, RewardMode::Sparse);
            let (header, back) = from_bytes(&bytes, &w).unwrap();
            assert_eq!(back, agent);
            assert!(header.attention);
            assert_eq!(header.reward_mode, RewardMode::Sparse);
        }
    }

    #[test]
    fn other_map_is_rejected() {
        let w = GridWorld::default_map();
        let mut map: MapFile = w.map_file().clone();
        map.max_steps = 99;
        let other = GridWorld::from_map(map).unwrap();
        let bytes = to_bytes(&Agent::new(AgentKind::Flat, &w), &w, false, RewardMode::Intrinsic);
        assert!(matches!(from_bytes(&bytes, &other), Err(PersistError::MapMismatch { .. })));
    }

    #[test]
    fn corrupt_input_is_rejected() {
        let w = GridWorld::default_map();
        let bytes = to_bytes(&Agent::new(AgentKind::Flat, &w), &w, false, RewardMode::Intrinsic);
        assert!(matches!(from_bytes(&bytes[..bytes.len() - 8], &w), Err(PersistError::Truncated)));
        assert!(matches!(from_bytes(b"nonsense-and-more", &w), Err(PersistError::BadMagic)));
    }

    #[test]
    fn missing_file_reports_cannot_open() {
        let err = load(Path::new("/nonexistent/tables.bin"), &GridWorld::default_map()).unwrap_err();
        assert!(err.to_string().starts_with("cannot open"));
    }
}

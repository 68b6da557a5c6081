use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::InfoType;

#[derive(Debug, Error, PartialEq)]
pub enum InfoSpaceError {
    #[error("priorities must be strictly increasing")]
    Unordered,
    #[error("each information type must appear exactly once")]
    Duplicate,
    #[error("inconsistent flags {0:?}: a later type is set before an earlier one")]
    Inconsistent([bool; 3]),
}

/// Ordered information types with their priorities (lower is earlier).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InformationSpace {
    entries: Vec<(InfoType, u32)>,
}

impl Default for InformationSpace {
    fn default() -> Self {
        Self { entries: vec![(InfoType::X, 1), (InfoType::Y, 2), (InfoType::Z, 3)] }
    }
}

impl InformationSpace {
    pub fn new(entries: Vec<(InfoType, u32)>) -> Result<Self, InfoSpaceError> {
        if entries.windows(2).any(|w| w[0].1 >= w[1].1) || entries.first().is_some_and(|e| e.1 == 0) {
            return Err(InfoSpaceError::Unordered);
        }
        for t in InfoType::ALL {
            if entries.iter().filter(|e| e.0 == t).count() != 1 {
                return Err(InfoSpaceError::Duplicate);
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(InfoType, u32)] {
        &self.entries
    }
}

/// First type (by priority) whose flag is unset, or `None` when everything is
/// collected. Flags must respect the ordering.
pub fn next_required_info(space: &InformationSpace, flags: [bool; 3]) -> Result<Option<InfoType>, InfoSpaceError> {
    let mut next = None;
    for &(t, _) in &space.entries {
        let set = flags[t.index()];
        match (set, next) {
            (false, None) => next = Some(t),
            (true, Some(_)) => return Err(InfoSpaceError::Inconsistent(flags)),
            _ => {}
        }
    }
    Ok(next)
}

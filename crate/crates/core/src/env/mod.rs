//! Discrete search-and-rescue grid world.
//!
//! The world is a rectangular grid holding a start cell, three ordered
//! information points (X, Y, Z), a victim, static obstacles, and hazards /
//! points of interest that stay hidden until a verbal message reveals them.
//! [`step`] is the pure transition + reward function; [`EnvRun`] wraps it
//! with per-episode bookkeeping (step budget, one-shot verbal triggers,
//! reveal status).

mod action;
mod path;
mod reward;
mod state;
mod step;
mod world;

pub use action::{Action, CollectLabel, Direction, Operation};
pub use path::shortest_path_length;
pub use reward::{RewardMode, RewardModel};
pub use state::AgentState;
pub use step::{step, EnvRun, Event, StepError, StepOutcome};
pub use world::{GridWorld, InfoPointSpec, MapFile, WorldError};

use std::fmt;

use serde::{Deserialize, Serialize};

/// Grid coordinate, row 0 at the top. Serialized as a `[row, col]` array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Neighbor one step in `dir`, or `None` when it would leave a
    /// `width` x `height` grid.
    pub fn neighbor(self, dir: Direction, width: usize, height: usize) -> Option<Cell> {
        let (dr, dc) = dir.delta();
        let row = self.row as isize + dr;
        let col = self.col as isize + dc;
        if row < 0 || col < 0 || row as usize >= height || col as usize >= width {
            None
        } else {
            Some(Cell::new(row as usize, col as usize))
        }
    }

    pub fn manhattan(self, other: Cell) -> usize {
        self.row.abs_diff(other.row) + self.col.abs_diff(other.col)
    }
}

impl From<[usize; 2]> for Cell {
    fn from([row, col]: [usize; 2]) -> Self {
        Cell::new(row, col)
    }
}

impl From<Cell> for [usize; 2] {
    fn from(c: Cell) -> Self {
        [c.row, c.col]
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// The three ordered information categories: victim details (X), navigation
/// routes (Y) and environmental hazards (Z).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InfoType {
    X,
    Y,
    Z,
}

impl InfoType {
    pub const ALL: [InfoType; 3] = [InfoType::X, InfoType::Y, InfoType::Z];

    pub fn index(self) -> usize {
        match self {
            InfoType::X => 0,
            InfoType::Y => 1,
            InfoType::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<InfoType> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for InfoType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InfoType::X => "X",
            InfoType::Y => "Y",
            InfoType::Z => "Z",
        };
        f.write_str(s)
    }
}

use serde::{Deserialize, Serialize};

use super::{Cell, InfoType};

/// MDP state: position, collected-information flags and the saved bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgentState {
    pub position: Cell,
    /// Collected flags in (X, Y, Z) order.
    pub info_flags: [bool; 3],
    pub victim_saved: bool,
}

impl AgentState {
    pub fn at(position: Cell) -> Self {
        Self { position, info_flags: [false; 3], victim_saved: false }
    }

    /// Number of distinct states on a `width` x `height` grid.
    pub fn space_size(width: usize, height: usize) -> usize {
        width * height * 16
    }

    pub fn flag_bits(&self) -> usize {
        self.info_flags.iter().enumerate().fold(0, |acc, (i, &f)| acc | ((f as usize) << (2 - i)))
    }

    /// `((row * width + col) * 8 + flags) * 2 + saved`, with X as the most
    /// significant flag bit.
    pub fn index(&self, width: usize) -> usize {
        let cell = self.position.row * width + self.position.col;
        (cell * 8 + self.flag_bits()) * 2 + self.victim_saved as usize
    }

    pub fn from_index(index: usize, width: usize) -> Self {
        let saved = index % 2 == 1;
        let rest = index / 2;
        let flags = rest % 8;
        let cell = rest / 8;
        Self {
            position: Cell::new(cell / width, cell % width),
            info_flags: [flags & 4 != 0, flags & 2 != 0, flags & 1 != 0],
            victim_saved: saved,
        }
    }

    pub fn has(&self, info: InfoType) -> bool {
        self.info_flags[info.index()]
    }

    pub fn all_collected(&self) -> bool {
        self.info_flags.iter().all(|&f| f)
    }
}

use std::fmt;

use serde::{Deserialize, Serialize};

use super::InfoType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    /// (row, col) offset.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
        }
    }
}

/// Operations available to the agent once it reaches the victim. Only `Save`
/// has an effect; the rest exist as distractors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Operation {
    Save,
    Use,
    Remove,
    Carry,
}

impl Operation {
    pub const ALL: [Operation; 4] = [Operation::Save, Operation::Use, Operation::Remove, Operation::Carry];
}

/// Labels the agent can collect. A, B and C never match an information point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CollectLabel {
    A,
    B,
    C,
    X,
    Y,
    Z,
}

impl CollectLabel {
    pub const ALL: [CollectLabel; 6] = [
        CollectLabel::A,
        CollectLabel::B,
        CollectLabel::C,
        CollectLabel::X,
        CollectLabel::Y,
        CollectLabel::Z,
    ];

    pub fn info_type(self) -> Option<InfoType> {
        match self {
            CollectLabel::X => Some(InfoType::X),
            CollectLabel::Y => Some(InfoType::Y),
            CollectLabel::Z => Some(InfoType::Z),
            _ => None,
        }
    }
}

/// One of the 14 primitive actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Move(Direction),
    Collect(CollectLabel),
    Operate(Operation),
}

impl Action {
    pub const COUNT: usize = 14;

    /// Canonical order: 4 moves, 6 collects, 4 operations.
    pub const ALL: [Action; Action::COUNT] = [
        Action::Move(Direction::Up),
        Action::Move(Direction::Down),
        Action::Move(Direction::Left),
        Action::Move(Direction::Right),
        Action::Collect(CollectLabel::A),
        Action::Collect(CollectLabel::B),
        Action::Collect(CollectLabel::C),
        Action::Collect(CollectLabel::X),
        Action::Collect(CollectLabel::Y),
        Action::Collect(CollectLabel::Z),
        Action::Operate(Operation::Save),
        Action::Operate(Operation::Use),
        Action::Operate(Operation::Remove),
        Action::Operate(Operation::Carry),
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&a| a == self).expect("every action is listed in ALL")
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Self::ALL.get(i).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Action::Move(Direction::Up) => "up",
            Action::Move(Direction::Down) => "down",
            Action::Move(Direction::Left) => "left",
            Action::Move(Direction::Right) => "right",
            Action::Collect(CollectLabel::A) => "A",
            Action::Collect(CollectLabel::B) => "B",
            Action::Collect(CollectLabel::C) => "C",
            Action::Collect(CollectLabel::X) => "X",
            Action::Collect(CollectLabel::Y) => "Y",
            Action::Collect(CollectLabel::Z) => "Z",
            Action::Operate(Operation::Save) => "save",
            Action::Operate(Operation::Use) => "use",
            Action::Operate(Operation::Remove) => "remove",
            Action::Operate(Operation::Carry) => "carry",
        }
    }

    pub fn from_label(label: &str) -> Option<Action> {
        Self::ALL.iter().copied().find(|a| a.label() == label)
    }

    pub fn direction(self) -> Option<Direction> {
        match self {
            Action::Move(d) => Some(d),
            _ => None,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn fourteen_distinct_actions() {
        let set: HashSet<_> = Action::ALL.iter().collect();
        assert_eq!(set.len(), 14);
        for (i, a) in Action::ALL.iter().enumerate() {
            assert_eq!(a.index(), i);
            assert_eq!(Action::from_label(a.label()), Some(*a));
        }
        assert_eq!(Action::from_index(14), None);
    }
}

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::path::tour_length;
use super::{Cell, InfoType};

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("cannot open map file {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed map file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invariant `in_bounds` violated: {what} at {cell} lies outside a {width}x{height} grid")]
    OutOfBounds { what: &'static str, cell: Cell, width: usize, height: usize },
    #[error("invariant `non_empty_grid` violated: grid must have positive width and height")]
    EmptyGrid,
    #[error("invariant `distinct_markers` violated: {cell} carries both {first} and {second}")]
    Overlap { cell: Cell, first: &'static str, second: &'static str },
    #[error("invariant `start_clear` violated: start {cell} coincides with the {what}")]
    StartConflict { cell: Cell, what: &'static str },
    #[error("invariant `one_info_point_per_type` violated: {0}")]
    InfoPoints(String),
    #[error("invariant `tour_exists` violated: no ordered tour start->X->Y->Z->victim{}", if *.avoid_hazards { " avoiding hazards" } else { "" })]
    NoTour { avoid_hazards: bool },
    #[error("invariant `positive_budget` violated: max_steps must be at least 1")]
    ZeroBudget,
}

impl WorldError {
    /// Short name of the violated invariant, for error payloads.
    pub fn invariant(&self) -> &'static str {
        match self {
            WorldError::Io { .. } => "readable",
            WorldError::Parse(_) => "well_formed",
            WorldError::OutOfBounds { .. } => "in_bounds",
            WorldError::EmptyGrid => "non_empty_grid",
            WorldError::Overlap { .. } => "distinct_markers",
            WorldError::StartConflict { .. } => "start_clear",
            WorldError::InfoPoints(_) => "one_info_point_per_type",
            WorldError::NoTour { .. } => "tour_exists",
            WorldError::ZeroBudget => "positive_budget",
        }
    }
}

/// One information point entry in a map file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoPointSpec {
    pub cell: Cell,
    #[serde(rename = "type")]
    pub info_type: InfoType,
    pub message: String,
}

/// On-disk map document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub width: usize,
    pub height: usize,
    pub start: Cell,
    pub info_points: Vec<InfoPointSpec>,
    pub victim: Cell,
    #[serde(default)]
    pub obstacles: Vec<Cell>,
    #[serde(default)]
    pub hazards: Vec<Cell>,
    #[serde(default)]
    pub points_of_interest: Vec<Cell>,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
}

fn default_max_steps() -> usize {
    200
}

/// A validated map. Construction goes through [`GridWorld::from_map`], so a
/// `GridWorld` value always satisfies its invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWorld {
    width: usize,
    height: usize,
    start: Cell,
    victim: Cell,
    info_points: [Cell; 3],
    messages: [String; 3],
    obstacle: Vec<bool>,
    hazard: Vec<bool>,
    poi: Vec<bool>,
    max_steps: usize,
    source: MapFile,
}

const DEFAULT_MAP: &str = include_str!("../../../../maps/default_map.json");

impl GridWorld {
    /// The shipped 8x8 map.
    pub fn default_map() -> Self {
        Self::from_json(DEFAULT_MAP).expect("shipped map is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, WorldError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| WorldError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, WorldError> {
        Self::from_map(serde_json::from_str(text)?)
    }

    pub fn from_map(map: MapFile) -> Result<Self, WorldError> {
        let (width, height) = (map.width, map.height);
        if width == 0 || height == 0 {
            return Err(WorldError::EmptyGrid);
        }
        if map.max_steps == 0 {
            return Err(WorldError::ZeroBudget);
        }
        let in_bounds = |what: &'static str, cell: Cell| {
            if cell.row < height && cell.col < width {
                Ok(())
            } else {
                Err(WorldError::OutOfBounds { what, cell, width, height })
            }
        };
        in_bounds("start", map.start)?;
        in_bounds("victim", map.victim)?;
        for ip in &map.info_points {
            in_bounds("info point", ip.cell)?;
        }
        for &c in &map.obstacles {
            in_bounds("obstacle", c)?;
        }
        for &c in &map.hazards {
            in_bounds("hazard", c)?;
        }
        for &c in &map.points_of_interest {
            in_bounds("point of interest", c)?;
        }

        // Exactly one info point per type.
        let mut by_type: BTreeMap<InfoType, &InfoPointSpec> = BTreeMap::new();
        for ip in &map.info_points {
            if by_type.insert(ip.info_type, ip).is_some() {
                return Err(WorldError::InfoPoints(format!("type {} appears more than once", ip.info_type)));
            }
        }
        for t in InfoType::ALL {
            if !by_type.contains_key(&t) {
                return Err(WorldError::InfoPoints(format!("type {t} is missing")));
            }
        }

        // No cell carries two of {info point, victim, obstacle}.
        let mut marked: BTreeMap<Cell, &'static str> = BTreeMap::new();
        let mut mark = |cell: Cell, what: &'static str| match marked.insert(cell, what) {
            Some(first) => Err(WorldError::Overlap { cell, first, second: what }),
            None => Ok(()),
        };
        for ip in &map.info_points {
            mark(ip.cell, "an info point")?;
        }
        mark(map.victim, "the victim")?;
        for &c in &map.obstacles {
            mark(c, "an obstacle")?;
        }
        if map.start == map.victim {
            return Err(WorldError::StartConflict { cell: map.start, what: "victim" });
        }
        if map.obstacles.contains(&map.start) {
            return Err(WorldError::StartConflict { cell: map.start, what: "an obstacle" });
        }
        for (&c, what) in map.hazards.iter().map(|c| (c, "a hazard")).chain(map.points_of_interest.iter().map(|c| (c, "a point of interest"))) {
            if c == map.start {
                return Err(WorldError::StartConflict { cell: c, what });
            }
            if c == map.victim {
                return Err(WorldError::Overlap { cell: c, first: "the victim", second: what });
            }
            if map.points_of_interest.contains(&c) && map.hazards.contains(&c) {
                return Err(WorldError::Overlap { cell: c, first: "a hazard", second: "a point of interest" });
            }
        }

        let n = width * height;
        let mut obstacle = vec![false; n];
        let mut hazard = vec![false; n];
        let mut poi = vec![false; n];
        for c in &map.obstacles {
            obstacle[c.row * width + c.col] = true;
        }
        for c in &map.hazards {
            hazard[c.row * width + c.col] = true;
        }
        for c in &map.points_of_interest {
            poi[c.row * width + c.col] = true;
        }
        let info_points = [by_type[&InfoType::X].cell, by_type[&InfoType::Y].cell, by_type[&InfoType::Z].cell];
        let messages = [
            by_type[&InfoType::X].message.clone(),
            by_type[&InfoType::Y].message.clone(),
            by_type[&InfoType::Z].message.clone(),
        ];

        let world = GridWorld {
            width,
            height,
            start: map.start,
            victim: map.victim,
            info_points,
            messages,
            obstacle,
            hazard,
            poi,
            max_steps: map.max_steps,
            source: map,
        };
        for avoid_hazards in [false, true] {
            if tour_length(&world, avoid_hazards).is_none() {
                return Err(WorldError::NoTour { avoid_hazards });
            }
        }
        Ok(world)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn victim(&self) -> Cell {
        self.victim
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    pub fn state_count(&self) -> usize {
        super::AgentState::space_size(self.width, self.height)
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.row < self.height && cell.col < self.width
    }

    fn flat(&self, cell: Cell) -> usize {
        cell.row * self.width + cell.col
    }

    pub fn is_obstacle(&self, cell: Cell) -> bool {
        self.in_bounds(cell) && self.obstacle[self.flat(cell)]
    }

    pub fn is_hazard(&self, cell: Cell) -> bool {
        self.in_bounds(cell) && self.hazard[self.flat(cell)]
    }

    pub fn is_point_of_interest(&self, cell: Cell) -> bool {
        self.in_bounds(cell) && self.poi[self.flat(cell)]
    }

    pub fn info_point(&self, info: InfoType) -> Cell {
        self.info_points[info.index()]
    }

    /// Information type of the point at `cell`, if any.
    pub fn info_at(&self, cell: Cell) -> Option<InfoType> {
        InfoType::ALL.into_iter().find(|t| self.info_points[t.index()] == cell)
    }

    /// Scripted verbal message attached to an information point.
    pub fn message(&self, info: InfoType) -> &str {
        &self.messages[info.index()]
    }

    pub fn obstacles(&self) -> &[Cell] {
        &self.source.obstacles
    }

    pub fn hazards(&self) -> &[Cell] {
        &self.source.hazards
    }

    pub fn points_of_interest(&self) -> &[Cell] {
        &self.source.points_of_interest
    }

    pub fn map_file(&self) -> &MapFile {
        &self.source
    }

    /// Overrides the step budget.
    pub fn with_max_steps(mut self, max_steps: usize) -> Result<Self, WorldError> {
        if max_steps == 0 {
            return Err(WorldError::ZeroBudget);
        }
        self.max_steps = max_steps;
        self.source.max_steps = max_steps;
        Ok(self)
    }

    /// Hex SHA-256 of the canonical JSON form of the map.
    pub fn content_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.source).expect("map serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

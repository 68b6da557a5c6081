use std::collections::VecDeque;

use super::{Cell, Direction, GridWorld, InfoType, WorldError};

/// Breadth-first move count from `from` to `to`, never entering obstacles
/// (and hazards when `avoid_hazards`).
pub(crate) fn bfs_distance(world: &GridWorld, from: Cell, to: Cell, avoid_hazards: bool) -> Option<usize> {
    let (w, h) = (world.width(), world.height());
    let mut dist = vec![usize::MAX; w * h];
    let mut queue = VecDeque::new();
    dist[from.row * w + from.col] = 0;
    queue.push_back(from);
    while let Some(cell) = queue.pop_front() {
        let d = dist[cell.row * w + cell.col];
        if cell == to {
            return Some(d);
        }
        for dir in Direction::ALL {
            let Some(next) = cell.neighbor(dir, w, h) else { continue };
            if world.is_obstacle(next) || (avoid_hazards && world.is_hazard(next)) {
                continue;
            }
            let slot = &mut dist[next.row * w + next.col];
            if *slot == usize::MAX {
                *slot = d + 1;
                queue.push_back(next);
            }
        }
    }
    None
}

pub(crate) fn tour_length(world: &GridWorld, avoid_hazards: bool) -> Option<usize> {
    let waypoints = [
        world.start(),
        world.info_point(InfoType::X),
        world.info_point(InfoType::Y),
        world.info_point(InfoType::Z),
        world.victim(),
    ];
    let moves = waypoints
        .windows(2)
        .map(|pair| bfs_distance(world, pair[0], pair[1], avoid_hazards))
        .sum::<Option<usize>>()?;
    // three collects and one save
    Some(moves + 4)
}

/// Length of the shortest ordered tour start -> X -> Y -> Z -> victim,
/// counting one step per collect and one for the final save.
pub fn shortest_path_length(world: &GridWorld, avoid_hazards: bool) -> Result<usize, WorldError> {
    tour_length(world, avoid_hazards).ok_or(WorldError::NoTour { avoid_hazards })
}

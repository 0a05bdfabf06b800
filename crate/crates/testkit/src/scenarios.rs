//! Deterministic crossing scenarios for the re-planning loop.
//!
//! Obstacles move in straight lines along a row, column, or exact diagonal,
//! one cell per tick, so a constant-velocity extrapolation matches them after
//! two observations. Conflict scenarios are phased so agent and obstacle
//! would co-arrive at the crossing cell; control scenarios pass near but
//! never closer than one cell.
//!
//! Obstacle lines cross the agent's route rather than running along it: the
//! wait-then-go scoring evaluates risk only after the wait, so a scripted
//! obstacle driving straight down the agent's own lane could collide during
//! the hold. Crossing geometries keep every plausible holding cell off the
//! obstacle's line.

use hoiplan_core::scene_grid::{Cell, OccupancyGrid};

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub grid: OccupancyGrid,
    pub start: Cell,
    pub goal: Cell,
    /// Obstacle waypoints, chained into a one-cell-per-tick track.
    pub obstacle: Vec<Cell>,
}

fn open_grid(w: usize, h: usize) -> OccupancyGrid {
    OccupancyGrid::from_walkable(w, h, 1.0, (0.5, 0.5), vec![true; w * h]).unwrap()
}

fn walled_grid(w: usize, h: usize, wall_y: usize, gap_x: usize) -> OccupancyGrid {
    let mut walkable = vec![true; w * h];
    for x in 0..w {
        if x != gap_x {
            walkable[wall_y * w + x] = false;
        }
    }
    OccupancyGrid::from_walkable(w, h, 1.0, (0.5, 0.5), walkable).unwrap()
}

/// Agent west-to-east along the middle row; obstacle crosses vertically
/// through the route. Both sides are five steps from the crossing, so they
/// co-arrive without interference.
fn perpendicular(i: usize) -> Scenario {
    let w = 15 + i % 3;
    let h = 11;
    let grid = open_grid(w, h);
    let xc = 5;
    // Small phase shifts: 0 is an exact co-arrival, +/-1 are brushes.
    let start_x = [0usize, 1, 0, 1, 0][i % 5];
    let obstacle = if i % 2 == 0 {
        vec![Cell::new(xc, 0), Cell::new(xc, h - 1)]
    } else {
        vec![Cell::new(xc, h - 1), Cell::new(xc, 0)]
    };
    Scenario {
        name: format!("perpendicular-{i}"),
        grid,
        start: Cell::new(start_x, 5),
        goal: Cell::new(w - 1, 5),
        obstacle,
    }
}

/// Both travel full diagonals of a square grid; odd sizes collide exactly at
/// the center, even sizes pass one cell apart.
fn diagonal(i: usize) -> Scenario {
    let n = 13 + i % 3;
    let grid = open_grid(n, n);
    let last = n - 1;
    let obstacle = if i % 2 == 0 {
        vec![Cell::new(last, 0), Cell::new(0, last)]
    } else {
        vec![Cell::new(0, last), Cell::new(last, 0)]
    };
    let (start, goal) = if i % 2 == 0 {
        (Cell::new(0, 0), Cell::new(last, last))
    } else {
        (Cell::new(last, last), Cell::new(0, 0))
    };
    Scenario { name: format!("diagonal-{i}"), grid, start, goal, obstacle }
}

/// A wall with a single gap; the obstacle threads the gap top-to-bottom while
/// the agent must pass through it bottom-to-top. Starts are phased for
/// co-arrival at the gap.
fn corridor(i: usize) -> Scenario {
    let (w, h) = (15, 11);
    let gap_x = 5 + i % 5;
    let grid = walled_grid(w, h, 5, gap_x);
    let obstacle = if i % 2 == 0 {
        vec![Cell::new(gap_x, 0), Cell::new(gap_x, h - 1)]
    } else {
        vec![Cell::new(gap_x, h - 1), Cell::new(gap_x, 0)]
    };
    // Five octile steps from the gap, approaching from below.
    let start = Cell::new(gap_x - 5, 6);
    Scenario {
        name: format!("corridor-{i}"),
        grid,
        start,
        goal: Cell::new(w - 2, 1),
        obstacle,
    }
}

/// Near-miss controls: the obstacle runs the opposite way along a parallel
/// row one or two cells off the agent's lane, or crosses far behind it.
fn parallel(i: usize) -> Scenario {
    let w = 16 + i % 4;
    let h = 9;
    let grid = open_grid(w, h);
    if i % 3 == 2 {
        // Crossing far to the east; the agent is long past by the time the
        // obstacle reaches the lane.
        let xc = w - 2;
        return Scenario {
            name: format!("late-cross-{i}"),
            grid,
            start: Cell::new(0, 4),
            goal: Cell::new(w - 1, 4),
            obstacle: vec![Cell::new(xc, h - 1), Cell::new(xc, h - 1), Cell::new(xc, 0)],
        };
    }
    let offset = 1 + i % 2;
    Scenario {
        name: format!("parallel-{i}"),
        grid,
        start: Cell::new(0, 4),
        goal: Cell::new(w - 1, 4),
        obstacle: vec![Cell::new(w - 1, 4 + offset), Cell::new(0, 4 + offset)],
    }
}

/// Mirror of `corridor`: agent descends through the gap while the obstacle
/// climbs through it.
fn gauntlet(i: usize) -> Scenario {
    let (w, h) = (15, 11);
    let gap_x = 5 + i % 5;
    let grid = walled_grid(w, h, 5, gap_x);
    let obstacle = if i % 2 == 0 {
        vec![Cell::new(gap_x, h - 1), Cell::new(gap_x, 0)]
    } else {
        vec![Cell::new(gap_x, 0), Cell::new(gap_x, h - 1)]
    };
    let start = Cell::new(gap_x - 5, 4);
    Scenario {
        name: format!("gauntlet-{i}"),
        grid,
        start,
        goal: Cell::new(w - 2, h - 2),
        obstacle,
    }
}

/// Fifty scripted scenarios across five families.
pub fn crossing_suite() -> Vec<Scenario> {
    let mut out = Vec::with_capacity(50);
    for i in 0..10 {
        out.push(perpendicular(i));
    }
    for i in 0..10 {
        out.push(diagonal(i));
    }
    for i in 0..10 {
        out.push(corridor(i));
    }
    for i in 0..10 {
        out.push(parallel(i));
    }
    for i in 0..10 {
        out.push(gauntlet(i));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_has_fifty_distinct_scenarios() {
        let suite = crossing_suite();
        assert_eq!(suite.len(), 50);
        let mut names: Vec<_> = suite.iter().map(|s| s.name.clone()).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 50);
    }

    #[test]
    fn endpoints_and_waypoints_are_walkable() {
        for s in crossing_suite() {
            assert!(s.grid.is_walkable(s.start), "{}: start blocked", s.name);
            assert!(s.grid.is_walkable(s.goal), "{}: goal blocked", s.name);
            for wp in &s.obstacle {
                assert!(s.grid.is_walkable(*wp), "{}: waypoint blocked", s.name);
            }
        }
    }
}

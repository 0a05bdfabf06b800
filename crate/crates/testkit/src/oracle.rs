//! Label-correcting shortest-path oracle.
//!
//! Sweeps every edge until no label improves (Bellman-Ford style), with no
//! priority queue, no heuristic, and no early exit. Labels carry the same
//! (step length, risk) component sums as the production planner and compare
//! by `step_sum + lambda_r * risk_sum`, so on agreement the costs are
//! bit-identical, not merely close.

use hoiplan_core::dynaplan::RiskMap;
use hoiplan_core::scene_grid::{Cell, OccupancyGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCost {
    pub step_length: f64,
    pub risk_term: f64,
    pub total: f64,
}

/// Exhaustive relaxation over the 8-connected walkable graph. Returns `None`
/// when the goal is unreachable. Panics on out-of-grid cells; oracle inputs
/// are produced by the tests themselves.
pub fn dijkstra(
    grid: &OccupancyGrid,
    start: Cell,
    goal: Cell,
    risk: Option<&RiskMap>,
    lambda_r: f64,
) -> Option<OracleCost> {
    assert!(grid.is_walkable(start) && grid.is_walkable(goal));
    let (w, h) = (grid.width(), grid.height());
    let idx = |x: usize, y: usize| y * w + x;
    let mut total = vec![f64::INFINITY; w * h];
    let mut sums = vec![(0.0f64, 0.0f64); w * h];
    total[idx(start.x, start.y)] = 0.0;

    let offsets: [(isize, isize); 8] =
        [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];

    let mut changed = true;
    while changed {
        changed = false;
        for y in 0..h {
            for x in 0..w {
                let u = idx(x, y);
                if total[u].is_infinite() || !grid.is_walkable(Cell::new(x, y)) {
                    continue;
                }
                for (dx, dy) in offsets {
                    let nx = x as isize + dx;
                    let ny = y as isize + dy;
                    if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                        continue;
                    }
                    let n = Cell::new(nx as usize, ny as usize);
                    if !grid.is_walkable(n) {
                        continue;
                    }
                    let step = if dx != 0 && dy != 0 { std::f64::consts::SQRT_2 } else { 1.0 };
                    let step_sum = sums[u].0 + step;
                    let risk_sum = sums[u].1 + risk.map_or(0.0, |r| r.value(n));
                    let t = step_sum + lambda_r * risk_sum;
                    let v = idx(n.x, n.y);
                    if t < total[v] {
                        total[v] = t;
                        sums[v] = (step_sum, risk_sum);
                        changed = true;
                    }
                }
            }
        }
    }

    let g = idx(goal.x, goal.y);
    if total[g].is_infinite() {
        None
    } else {
        Some(OracleCost { step_length: sums[g].0, risk_term: sums[g].1, total: total[g] })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn open_grid(w: usize, h: usize) -> OccupancyGrid {
        OccupancyGrid::from_walkable(w, h, 1.0, (0.5, 0.5), vec![true; w * h]).unwrap()
    }

    #[test]
    fn straight_line_cost() {
        let g = open_grid(5, 1);
        let c = dijkstra(&g, Cell::new(0, 0), Cell::new(4, 0), None, 0.0).unwrap();
        assert_eq!(c.total, 4.0);
    }

    #[test]
    fn diagonal_cost() {
        let g = open_grid(4, 4);
        let c = dijkstra(&g, Cell::new(0, 0), Cell::new(3, 3), None, 0.0).unwrap();
        assert!((c.total - 3.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn unreachable_is_none() {
        let mut walk = vec![true; 15];
        for y in 0..3 {
            walk[y * 5 + 2] = false;
        }
        let g = OccupancyGrid::from_walkable(5, 3, 1.0, (0.5, 0.5), walk).unwrap();
        assert!(dijkstra(&g, Cell::new(0, 1), Cell::new(4, 1), None, 0.0).is_none());
    }

    #[test]
    fn risk_is_weighted_into_the_total() {
        let g = open_grid(3, 1);
        let risk = RiskMap::from_values(3, 1, vec![9.0, 0.5, 0.25]).unwrap();
        let c = dijkstra(&g, Cell::new(0, 0), Cell::new(2, 0), Some(&risk), 2.0).unwrap();
        // Start risk excluded: 2 steps, risk 0.75.
        assert_eq!(c.step_length, 2.0);
        assert_eq!(c.risk_term, 0.75);
        assert_eq!(c.total, 2.0 + 2.0 * 0.75);
    }
}

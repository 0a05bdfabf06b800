//! Grid path search with an additive risk penalty.
//!
//! Moves are 8-connected; a move into cell v costs `step(v) + lambda_r * R(v)`
//! where `step` is 1 or sqrt(2) cell units and `R` is an optional risk field.
//! The start cell contributes no risk (the agent is already there).
//!
//! Costs are tracked as separate step-length and risk sums, and paths are
//! compared by `step_sum + lambda_r * risk_sum` evaluated with exactly that
//! expression, so the reported total is a well-defined function of the path
//! and can be reproduced by any independent search.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::dynaplan::RiskMap;
use crate::error::{Error, Result};
use crate::scene_grid::{Cell, GridPath, OccupancyGrid};

/// Cost breakdown of a path. `total` always equals
/// `step_length + lambda_r * risk_term` as a floating-point expression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanCost {
    pub step_length: f64,
    pub risk_term: f64,
    pub lambda_r: f64,
    pub total: f64,
}

impl PlanCost {
    fn new(step_length: f64, risk_term: f64, lambda_r: f64) -> Self {
        PlanCost { step_length, risk_term, lambda_r, total: step_length + lambda_r * risk_term }
    }
}

const NEIGHBORS: [(isize, isize); 8] = [
    (-1, -1), (0, -1), (1, -1),
    (-1, 0), (1, 0),
    (-1, 1), (0, 1), (1, 1),
];

fn step_len(dx: isize, dy: isize) -> f64 {
    if dx != 0 && dy != 0 {
        std::f64::consts::SQRT_2
    } else {
        1.0
    }
}

/// Open-list entry ordered by (f, h, row, col) ascending.
struct Entry {
    f: f64,
    h: f64,
    cell: Cell,
    step_sum: f64,
    risk_sum: f64,
    total: f64,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed so the max-heap pops the smallest (f, h, row, col) first.
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.h.total_cmp(&self.h))
            .then_with(|| other.cell.y.cmp(&self.cell.y))
            .then_with(|| other.cell.x.cmp(&self.cell.x))
    }
}

fn risk_at(risk: Option<&RiskMap>, cell: Cell) -> f64 {
    risk.map_or(0.0, |r| r.value(cell))
}

/// A* over the walkable cells. Returns `Ok(None)` when the goal is
/// unreachable. Ties on the frontier break toward smaller heuristic, then
/// smaller (row, col), so the returned path is deterministic.
pub fn astar(
    grid: &OccupancyGrid,
    start: Cell,
    goal: Cell,
    risk: Option<&RiskMap>,
    lambda_r: f64,
) -> Result<Option<(GridPath, PlanCost)>> {
    if !grid.is_walkable(start) {
        return Err(Error::invalid(format!("start cell ({},{}) is not walkable", start.x, start.y)));
    }
    if !grid.is_walkable(goal) {
        return Err(Error::invalid(format!("goal cell ({},{}) is not walkable", goal.x, goal.y)));
    }
    if let Some(r) = risk {
        if r.width() != grid.width() || r.height() != grid.height() {
            return Err(Error::invalid("risk map dimensions do not match the grid"));
        }
    }
    if !(lambda_r.is_finite() && lambda_r >= 0.0) {
        return Err(Error::invalid("lambda_r must be non-negative and finite"));
    }

    let (w, h) = (grid.width(), grid.height());
    let idx = |c: Cell| c.y * w + c.x;
    let mut best_total = vec![f64::INFINITY; w * h];
    let mut best_sums = vec![(0.0f64, 0.0f64); w * h];
    let mut parent: Vec<Option<Cell>> = vec![None; w * h];
    let mut heap = BinaryHeap::new();

    best_total[idx(start)] = 0.0;
    heap.push(Entry {
        f: start.distance(goal),
        h: start.distance(goal),
        cell: start,
        step_sum: 0.0,
        risk_sum: 0.0,
        total: 0.0,
    });

    // The queue is exhausted rather than stopped at the first goal pop, so the
    // final label is the exact minimum of the float-evaluated path costs.
    while let Some(e) = heap.pop() {
        if e.total > best_total[idx(e.cell)] {
            continue;
        }
        for (dx, dy) in NEIGHBORS {
            let nx = e.cell.x as isize + dx;
            let ny = e.cell.y as isize + dy;
            if nx < 0 || ny < 0 || nx as usize >= w || ny as usize >= h {
                continue;
            }
            let n = Cell::new(nx as usize, ny as usize);
            if !grid.is_walkable(n) {
                continue;
            }
            let step_sum = e.step_sum + step_len(dx, dy);
            let risk_sum = e.risk_sum + risk_at(risk, n);
            let total = step_sum + lambda_r * risk_sum;
            if total < best_total[idx(n)] {
                best_total[idx(n)] = total;
                best_sums[idx(n)] = (step_sum, risk_sum);
                parent[idx(n)] = Some(e.cell);
                let hn = n.distance(goal);
                heap.push(Entry { f: total + hn, h: hn, cell: n, step_sum, risk_sum, total });
            }
        }
    }

    if best_total[idx(goal)].is_infinite() {
        return Ok(None);
    }
    let mut cells = vec![goal];
    let mut cur = goal;
    while let Some(p) = parent[idx(cur)] {
        cells.push(p);
        cur = p;
    }
    cells.reverse();
    let path = GridPath::from_cells(cells, grid)?;
    let (s, r) = best_sums[idx(goal)];
    Ok(Some((path, PlanCost::new(s, r, lambda_r))))
}

/// Recomputes the cost of an existing path under a risk field. The start
/// cell's risk is excluded; step lengths and risks accumulate start to end.
pub fn path_cost(path: &GridPath, risk: Option<&RiskMap>, lambda_r: f64) -> Result<PlanCost> {
    if !(lambda_r.is_finite() && lambda_r >= 0.0) {
        return Err(Error::invalid("lambda_r must be non-negative and finite"));
    }
    let cells = path.cells();
    let mut step_sum = 0.0;
    let mut risk_sum = 0.0;
    for pair in cells.windows(2) {
        step_sum += pair[0].distance(pair[1]);
        risk_sum += risk_at(risk, pair[1]);
    }
    Ok(PlanCost::new(step_sum, risk_sum, lambda_r))
}

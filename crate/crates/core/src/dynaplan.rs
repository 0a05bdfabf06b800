//! Predictive re-planning around a moving obstacle.
//!
//! Each tick the agent compares its committed motion against predicted
//! obstacle positions. On a predicted conflict it scores wait-then-go
//! candidates: hold position for k ticks, then follow a fresh risk-aware path
//! planned against the obstacle configuration expected after the wait. The
//! candidate minimizing `path cost + lambda_w * k` wins; ties prefer the
//! shorter wait.

use crate::error::{Error, Result};
use crate::planner::{astar, PlanCost};
use crate::scene_grid::{Cell, GridPath, OccupancyGrid};

/// Per-cell risk values aligned with an occupancy grid (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct RiskMap {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl RiskMap {
    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != width * height {
            return Err(Error::invalid(format!(
                "risk map has {} values, expected {}",
                values.len(),
                width * height
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid("risk values must be finite and non-negative"));
        }
        Ok(RiskMap { width, height, values })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn value(&self, cell: Cell) -> f64 {
        self.values[cell.y * self.width + cell.x]
    }
}

/// Tuning constants for the re-planning loop. Distances are meters unless
/// noted; `sigma` is measured in grid cells.
#[derive(Debug, Clone, PartialEq)]
pub struct DynaPlanParams {
    /// Gaussian width of a risk source, in cell units.
    pub sigma: f64,
    /// Per-step decay applied to predicted positions.
    pub gamma: f64,
    /// Weight of the risk term in path cost.
    pub lambda_r: f64,
    /// Cost of one waiting tick, in cell-length units.
    pub lambda_w: f64,
    pub agent_radius: f64,
    pub obstacle_radius: f64,
    /// Observation window for the constant-velocity predictor.
    pub t_obs: usize,
    /// Prediction horizon in ticks.
    pub t_pred: usize,
    /// Maximum simulated ticks before the timeline is cut off.
    pub step_budget: usize,
}

impl Default for DynaPlanParams {
    fn default() -> Self {
        DynaPlanParams {
            sigma: 1.0,
            gamma: 0.8,
            lambda_r: 4.0,
            lambda_w: 1.0,
            agent_radius: 0.3,
            obstacle_radius: 0.3,
            t_obs: 8,
            t_pred: 12,
            step_budget: 500,
        }
    }
}

impl DynaPlanParams {
    fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::invalid("sigma must be positive"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::invalid("gamma must lie strictly inside (0, 1)"));
        }
        if !(self.lambda_r.is_finite() && self.lambda_r >= 0.0) {
            return Err(Error::invalid("lambda_r must be non-negative"));
        }
        if !(self.lambda_w.is_finite() && self.lambda_w >= 0.0) {
            return Err(Error::invalid("lambda_w must be non-negative"));
        }
        if !(self.agent_radius.is_finite() && self.agent_radius >= 0.0)
            || !(self.obstacle_radius.is_finite() && self.obstacle_radius >= 0.0)
        {
            return Err(Error::invalid("radii must be non-negative"));
        }
        if self.t_pred == 0 {
            return Err(Error::invalid("t_pred must be positive"));
        }
        Ok(())
    }
}

/// Produces future obstacle positions from the positions observed so far.
/// `observed` holds every position up to and including the current tick.
pub trait ObstaclePredictor {
    fn predict(&self, observed: &[(f64, f64)], horizon: usize) -> Result<Vec<(f64, f64)>>;
}

/// Extrapolates with the mean displacement over the most recent `t_obs`
/// observations. A single observation predicts a stationary obstacle.
#[derive(Debug, Clone)]
pub struct ConstantVelocityPredictor {
    pub t_obs: usize,
}

impl ConstantVelocityPredictor {
    pub fn new(t_obs: usize) -> Self {
        ConstantVelocityPredictor { t_obs }
    }
}

impl ObstaclePredictor for ConstantVelocityPredictor {
    fn predict(&self, observed: &[(f64, f64)], horizon: usize) -> Result<Vec<(f64, f64)>> {
        if observed.is_empty() {
            return Err(Error::invalid("prediction needs at least one observation"));
        }
        if horizon == 0 {
            return Err(Error::invalid("prediction horizon must be positive"));
        }
        let window_start = observed.len().saturating_sub(self.t_obs.max(1));
        let window = &observed[window_start..];
        let (mut vx, mut vy) = (0.0, 0.0);
        if window.len() >= 2 {
            for pair in window.windows(2) {
                vx += pair[1].0 - pair[0].0;
                vy += pair[1].1 - pair[0].1;
            }
            let n = (window.len() - 1) as f64;
            vx /= n;
            vy /= n;
        }
        let last = *observed.last().unwrap();
        Ok((1..=horizon)
            .map(|k| (last.0 + k as f64 * vx, last.1 + k as f64 * vy))
            .collect())
    }
}

/// Replays a known ground-truth track; the current tick is inferred from the
/// observation count. Positions past the end of the track repeat its last
/// entry. Intended for tests.
#[derive(Debug, Clone)]
pub struct OraclePredictor {
    track: Vec<(f64, f64)>,
}

impl OraclePredictor {
    pub fn new(track: Vec<(f64, f64)>) -> Self {
        OraclePredictor { track }
    }
}

impl ObstaclePredictor for OraclePredictor {
    fn predict(&self, observed: &[(f64, f64)], horizon: usize) -> Result<Vec<(f64, f64)>> {
        if observed.is_empty() {
            return Err(Error::invalid("prediction needs at least one observation"));
        }
        if horizon == 0 {
            return Err(Error::invalid("prediction horizon must be positive"));
        }
        if self.track.is_empty() {
            return Err(Error::invalid("oracle predictor has an empty track"));
        }
        let t = observed.len() - 1;
        Ok((1..=horizon)
            .map(|k| self.track[(t + k).min(self.track.len() - 1)])
            .collect())
    }
}

/// Earliest index where the two position sequences come closer than the sum
/// of radii (strict), or `None`. Sequences must be time-aligned and equally
/// long.
pub fn detect_collision(
    agent: &[(f64, f64)],
    obstacle: &[(f64, f64)],
    r_agent: f64,
    r_obs: f64,
) -> Result<Option<usize>> {
    if agent.len() != obstacle.len() {
        return Err(Error::invalid(format!(
            "agent sequence has {} steps, obstacle has {}",
            agent.len(),
            obstacle.len()
        )));
    }
    if !(r_agent.is_finite() && r_agent >= 0.0 && r_obs.is_finite() && r_obs >= 0.0) {
        return Err(Error::invalid("radii must be non-negative and finite"));
    }
    let limit = r_agent + r_obs;
    let limit_sq = limit * limit;
    for (i, (a, o)) in agent.iter().zip(obstacle.iter()).enumerate() {
        let dx = a.0 - o.0;
        let dy = a.1 - o.1;
        if dx * dx + dy * dy < limit_sq {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Gaussian risk field around the obstacle's current position (weight 1) and
/// its predictions (weight `gamma^k` for the k-th step ahead). Distances are
/// evaluated between cell centers in grid units; contributions beyond six
/// sigma (< 2e-8) are dropped.
pub fn build_risk_map(
    grid: &OccupancyGrid,
    current: (f64, f64),
    predictions: &[(f64, f64)],
    sigma: f64,
    gamma: f64,
) -> Result<RiskMap> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid("sigma must be positive"));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid("gamma must lie strictly inside (0, 1)"));
    }
    let (w, h) = (grid.width(), grid.height());
    let res = grid.resolution();
    let origin = grid.origin();
    let mut values = vec![0.0; w * h];
    let cutoff_sq = (6.0 * sigma) * (6.0 * sigma);
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);

    let mut add_source = |pos: (f64, f64), weight: f64| {
        // Source position in cell units; cell centers sit at integer coords.
        let gx = (pos.0 - origin.0) / res;
        let gy = (pos.1 - origin.1) / res;
        let x0 = ((gx - 6.0 * sigma).ceil().max(0.0)) as usize;
        let x1 = ((gx + 6.0 * sigma).floor().min(w as f64 - 1.0)) as isize;
        let y0 = ((gy - 6.0 * sigma).ceil().max(0.0)) as usize;
        let y1 = ((gy + 6.0 * sigma).floor().min(h as f64 - 1.0)) as isize;
        if x1 < x0 as isize || y1 < y0 as isize {
            return;
        }
        for y in y0..=y1 as usize {
            for x in x0..=x1 as usize {
                let dx = x as f64 - gx;
                let dy = y as f64 - gy;
                let d_sq = dx * dx + dy * dy;
                if d_sq <= cutoff_sq {
                    values[y * w + x] += weight * (-d_sq * inv_two_sigma_sq).exp();
                }
            }
        }
    };

    add_source(current, 1.0);
    let mut weight = 1.0;
    for &p in predictions {
        weight *= gamma;
        add_source(p, weight);
    }
    RiskMap::from_values(w, h, values)
}

/// Outcome of wait-candidate scoring: hold for `wait_steps` ticks, then
/// follow `path`. `score = cost.total + lambda_w * wait_steps`.
#[derive(Debug, Clone)]
pub struct PlanDecision {
    pub wait_steps: usize,
    pub path: GridPath,
    pub cost: PlanCost,
    pub score: f64,
}

/// Scores every wait length k in 0..=t_pred. For candidate k the obstacle is
/// advanced k predicted steps; the risk map is rebuilt around that anchor with
/// the following t_pred predictions, and a risk-aware path is planned from the
/// (unchanged) agent position. Returns `None` when no candidate has a path.
pub fn evaluate_wait_candidates(
    grid: &OccupancyGrid,
    agent: Cell,
    goal: Cell,
    observed: &[(f64, f64)],
    predictor: &dyn ObstaclePredictor,
    params: &DynaPlanParams,
) -> Result<Option<PlanDecision>> {
    params.validate()?;
    if observed.is_empty() {
        return Err(Error::invalid("wait-candidate scoring needs an observed obstacle position"));
    }
    if !grid.is_walkable(agent) {
        return Err(Error::invalid("agent cell is not walkable"));
    }
    if !grid.is_walkable(goal) {
        return Err(Error::invalid("goal cell is not walkable"));
    }
    // One long prediction covers every shifted window, so all candidates see
    // a consistent future.
    let horizon = 2 * params.t_pred;
    let preds = predictor.predict(observed, horizon)?;
    let current = *observed.last().unwrap();

    let mut best: Option<PlanDecision> = None;
    for k in 0..=params.t_pred {
        let anchor = if k == 0 { current } else { preds[k - 1] };
        let window = &preds[k..k + params.t_pred];
        let risk = build_risk_map(grid, anchor, window, params.sigma, params.gamma)?;
        if let Some((path, cost)) = astar(grid, agent, goal, Some(&risk), params.lambda_r)? {
            let score = cost.total + params.lambda_w * k as f64;
            let better = match &best {
                None => true,
                Some(b) => score < b.score,
            };
            if better {
                best = Some(PlanDecision { wait_steps: k, path, cost, score });
            }
        }
    }
    Ok(best)
}

/// Scripted obstacle motion: chained shortest paths between waypoints,
/// advancing one cell per tick. A repeated waypoint holds the obstacle in
/// place for one extra tick. After the script ends the obstacle stays put.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleTrack {
    cells: Vec<Cell>,
    world: Vec<(f64, f64)>,
}

impl ObstacleTrack {
    pub fn from_waypoints(grid: &OccupancyGrid, waypoints: &[Cell]) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::invalid("obstacle script needs at least one waypoint"));
        }
        let mut cells = vec![waypoints[0]];
        for pair in waypoints.windows(2) {
            match astar(grid, pair[0], pair[1], None, 0.0)? {
                Some((path, _)) => {
                    if path.cells().len() == 1 {
                        // Dwell: the repeated waypoint costs one tick.
                        cells.push(pair[1]);
                    } else {
                        cells.extend_from_slice(&path.cells()[1..]);
                    }
                }
                None => {
                    return Err(Error::invalid(format!(
                        "no path between obstacle waypoints ({},{}) and ({},{})",
                        pair[0].x, pair[0].y, pair[1].x, pair[1].y
                    )))
                }
            }
        }
        let world = cells.iter().map(|&c| grid.cell_to_world(c)).collect();
        Ok(ObstacleTrack { cells, world })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn position_at(&self, t: usize) -> (f64, f64) {
        self.world[t.min(self.world.len() - 1)]
    }

    pub fn world_positions(&self) -> &[(f64, f64)] {
        &self.world
    }
}

/// What happened during one simulated tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimelineEvent {
    /// The agent advanced (or stood, with nothing to do).
    None,
    /// A predicted conflict triggered a new decision this tick.
    Replanned { wait_steps: usize },
    /// The agent held position as part of an adopted wait.
    Waiting,
    GoalReached,
    BudgetExhausted,
}

/// One record per tick; positions are world coordinates at the start of the
/// tick, before the tick's movement is applied.
#[derive(Debug, Clone, PartialEq)]
pub struct TimelineStep {
    pub t: usize,
    pub agent: (f64, f64),
    pub obstacle: Option<(f64, f64)>,
    pub event: TimelineEvent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTimeline {
    pub steps: Vec<TimelineStep>,
    /// True when the final event is `GoalReached`.
    pub complete: bool,
    pub replan_count: usize,
    pub wait_ticks: usize,
    pub min_separation: Option<f64>,
}

/// Future agent positions (world) for ticks t+1..=horizon under the current
/// decision: finish any remaining wait, then follow the plan.
fn agent_future(
    grid: &OccupancyGrid,
    agent: Cell,
    plan: Option<(&GridPath, usize)>,
    wait_remaining: usize,
    horizon: usize,
) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(horizon);
    let mut wait = wait_remaining;
    let mut idx = plan.map(|(_, i)| i).unwrap_or(0);
    for _ in 0..horizon {
        if wait > 0 {
            wait -= 1;
        } else if let Some((path, _)) = plan {
            if idx + 1 < path.cells().len() {
                idx += 1;
            }
        }
        let cell = plan.map(|(path, _)| path.cells()[idx]).unwrap_or(agent);
        out.push(grid.cell_to_world(cell));
    }
    out
}

/// Runs the tick loop: observe, detect against fresh predictions, adopt a new
/// decision on predicted conflict, then wait or advance one cell.
pub fn run_dynaplan(
    grid: &OccupancyGrid,
    start: Cell,
    goal: Cell,
    obstacle: Option<&ObstacleTrack>,
    predictor: &dyn ObstaclePredictor,
    params: &DynaPlanParams,
) -> Result<SimulationTimeline> {
    params.validate()?;
    if !grid.is_walkable(start) {
        return Err(Error::invalid("start cell is not walkable"));
    }
    if !grid.is_walkable(goal) {
        return Err(Error::invalid("goal cell is not walkable"));
    }

    let mut plan: Option<(GridPath, usize)> =
        astar(grid, start, goal, None, params.lambda_r)?.map(|(p, _)| (p, 0));
    let mut agent = start;
    let mut wait_remaining = 0usize;
    let mut observed: Vec<(f64, f64)> = Vec::new();

    let mut steps = Vec::new();
    let mut replan_count = 0usize;
    let mut wait_ticks = 0usize;
    let mut min_separation: Option<f64> = None;
    let mut complete = false;

    for t in 0..params.step_budget {
        let agent_world = grid.cell_to_world(agent);
        let obstacle_world = obstacle.map(|tr| tr.position_at(t));
        if let Some(o) = obstacle_world {
            observed.push(o);
            let d = ((agent_world.0 - o.0).powi(2) + (agent_world.1 - o.1).powi(2)).sqrt();
            min_separation = Some(min_separation.map_or(d, |m: f64| m.min(d)));
        }

        if agent == goal {
            steps.push(TimelineStep {
                t,
                agent: agent_world,
                obstacle: obstacle_world,
                event: TimelineEvent::GoalReached,
            });
            complete = true;
            break;
        }

        let mut event = TimelineEvent::None;
        if obstacle.is_some() {
            let preds = predictor.predict(&observed, params.t_pred)?;
            let future = agent_future(
                grid,
                agent,
                plan.as_ref().map(|(p, i)| (p, *i)),
                wait_remaining,
                params.t_pred,
            );
            if detect_collision(&future, &preds, params.agent_radius, params.obstacle_radius)?
                .is_some()
            {
                if let Some(decision) =
                    evaluate_wait_candidates(grid, agent, goal, &observed, predictor, params)?
                {
                    wait_remaining = decision.wait_steps;
                    plan = Some((decision.path, 0));
                    replan_count += 1;
                    event = TimelineEvent::Replanned { wait_steps: decision.wait_steps };
                }
            }
        }

        if wait_remaining > 0 {
            wait_remaining -= 1;
            wait_ticks += 1;
            if event == TimelineEvent::None {
                event = TimelineEvent::Waiting;
            }
        } else if let Some((path, idx)) = plan.as_mut() {
            if *idx + 1 < path.cells().len() {
                *idx += 1;
                agent = path.cells()[*idx];
            }
        }

        steps.push(TimelineStep { t, agent: agent_world, obstacle: obstacle_world, event });
    }

    if !complete {
        let t = params.step_budget;
        let agent_world = grid.cell_to_world(agent);
        let obstacle_world = obstacle.map(|tr| tr.position_at(t));
        if let (Some(o), agent_w) = (obstacle_world, agent_world) {
            let d = ((agent_w.0 - o.0).powi(2) + (agent_w.1 - o.1).powi(2)).sqrt();
            min_separation = Some(min_separation.map_or(d, |m: f64| m.min(d)));
        }
        steps.push(TimelineStep {
            t,
            agent: agent_world,
            obstacle: obstacle_world,
            event: TimelineEvent::BudgetExhausted,
        });
    }

    Ok(SimulationTimeline { steps, complete, replan_count, wait_ticks, min_separation })
}

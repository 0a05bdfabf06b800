//! Subcommand implementations. Each command resolves its parameters from
//! flags, the optional config file, and built-in defaults (in that order of
//! precedence), runs the corresponding module, and emits one output artifact
//! with the invocation seed in its header.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Deserialize;

use hoiplan_core::dynaplan::{
    run_dynaplan, ConstantVelocityPredictor, DynaPlanParams, ObstaclePredictor, ObstacleTrack,
    OraclePredictor, TimelineEvent,
};
use hoiplan_core::geometry::{SdfGrid, Skeleton};
use hoiplan_core::landscape::{
    evaluate_grid, orthogonalize, sample_direction, BuiltinLoss, ParamVector,
};
use hoiplan_core::metrics::{
    condition_matching, contact_labels, contact_metrics, diversity, estimate_floor, fid,
    foot_height, foot_sliding, mpjpe, orientation_error, penetration, r_precision,
    translation_error, DiversityPairs, MetricReport, PenetrationAveraging, FLOOR_BIN_WIDTH,
    QUASI_STATIC_SPEED, SLIDE_THRESHOLDS,
};
use hoiplan_core::planner::astar;
use hoiplan_core::scene_grid::Cell;

use crate::formats::{
    self, load_scenario, PlanCostOut, PlanOutput, PredictorKind, SceneFile, SummaryRecord,
    TimelineHeader, TimelineRecord, TimelineSummary,
};

/// How a command ended: success maps to exit code 0, a domain-level negative
/// result (no path, incomplete timeline) to exit code 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Negative,
}

/// Per-invocation context shared by every subcommand.
pub struct Ctx {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub config: RunConfig,
}

impl Ctx {
    /// Writes to the output file, or stdout when none was given.
    fn emit(&self, content: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, content)
                .with_context(|| format!("writing {}", path.display())),
            None => {
                print!("{content}");
                Ok(())
            }
        }
    }
}

/// Optional per-subcommand defaults loaded from the `--config` file; flags
/// still win. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub plan: PlanConfig,
    pub simulate: SimulateConfig,
    pub eval: EvalConfig,
    pub landscape: LandscapeConfig,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlanConfig {
    pub lambda_r: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub params: Option<formats::ParamOverrides>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub pool_size: Option<usize>,
    pub diversity_pairs: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LandscapeConfig {
    pub r: Option<f64>,
    pub steps: Option<usize>,
    pub dims: Option<usize>,
}

fn parse_cell(s: &str) -> std::result::Result<Cell, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected x,y, got '{s}'"));
    }
    let x = parts[0].trim().parse::<usize>().map_err(|e| format!("bad x '{}': {e}", parts[0]))?;
    let y = parts[1].trim().parse::<usize>().map_err(|e| format!("bad y '{}': {e}", parts[1]))?;
    Ok(Cell::new(x, y))
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Scene description (JSON).
    pub scene: PathBuf,
    /// Start cell as x,y.
    #[arg(long, value_parser = parse_cell)]
    pub start: Cell,
    /// Goal cell as x,y.
    #[arg(long, value_parser = parse_cell)]
    pub goal: Cell,
    /// Optional risk raster matching the scene grid.
    #[arg(long)]
    pub risk: Option<PathBuf>,
    /// Risk weight in the path cost.
    #[arg(long)]
    pub lambda_r: Option<f64>,
}

/// Plans a risk-aware path and writes it as a JSON polyline with the cost
/// summary. Unreachable or blocked endpoints are a negative result, not an
/// input error.
pub fn cmd_plan(ctx: &Ctx, args: &PlanArgs) -> Result<Outcome> {
    let scene: SceneFile = formats::read_json(&args.scene)?;
    let grid = scene.to_grid().with_context(|| format!("rasterizing {}", args.scene.display()))?;
    let lambda_r = args.lambda_r.or(ctx.config.plan.lambda_r).unwrap_or(0.0);
    for (name, cell) in [("start", args.start), ("goal", args.goal)] {
        if !grid.contains(cell) {
            bail!(
                "{name} cell ({},{}) is outside the {}x{} grid",
                cell.x,
                cell.y,
                grid.width(),
                grid.height()
            );
        }
    }
    if !grid.is_walkable(args.start) || !grid.is_walkable(args.goal) {
        eprintln!(
            "no path: start ({},{}) or goal ({},{}) is blocked",
            args.start.x, args.start.y, args.goal.x, args.goal.y
        );
        return Ok(Outcome::Negative);
    }
    let risk = match &args.risk {
        Some(path) => Some(formats::read_risk(path, grid.width(), grid.height())?),
        None => None,
    };
    match astar(&grid, args.start, args.goal, risk.as_ref(), lambda_r)? {
        None => {
            eprintln!(
                "no path from ({},{}) to ({},{})",
                args.start.x, args.start.y, args.goal.x, args.goal.y
            );
            Ok(Outcome::Negative)
        }
        Some((path, cost)) => {
            let output = PlanOutput {
                seed: ctx.seed,
                cells: path.cells().iter().map(|c| [c.x, c.y]).collect(),
                world: path
                    .cells()
                    .iter()
                    .map(|&c| {
                        let (x, y) = grid.cell_to_world(c);
                        [x, y]
                    })
                    .collect(),
                cost: PlanCostOut {
                    step_length: cost.step_length,
                    risk_term: cost.risk_term,
                    lambda_r: cost.lambda_r,
                    total: cost.total,
                },
            };
            let mut text = serde_json::to_string_pretty(&output)?;
            text.push('\n');
            ctx.emit(&text)?;
            Ok(Outcome::Success)
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario description (JSON).
    pub scenario: PathBuf,
}

/// Runs the replanning tick loop and writes a JSON-lines timeline with a
/// trailing summary. A timeline that never reaches the goal is a negative
/// result.
pub fn cmd_simulate(ctx: &Ctx, args: &SimulateArgs) -> Result<Outcome> {
    let (scenario, grid) = load_scenario(&args.scenario)?;
    let mut params = DynaPlanParams::default();
    if let Some(over) = &scenario.params {
        params = over.apply(params);
    }
    if let Some(over) = &ctx.config.simulate.params {
        params = over.apply(params);
    }
    let start = Cell::new(scenario.start[0], scenario.start[1]);
    let goal = Cell::new(scenario.goal[0], scenario.goal[1]);
    let track = match &scenario.obstacle {
        Some(waypoints) => {
            let cells: Vec<Cell> = waypoints.iter().map(|w| Cell::new(w[0], w[1])).collect();
            Some(
                ObstacleTrack::from_waypoints(&grid, &cells)
                    .with_context(|| format!("obstacle script in {}", args.scenario.display()))?,
            )
        }
        None => None,
    };
    let predictor: Box<dyn ObstaclePredictor> = match (scenario.predictor, &track) {
        (PredictorKind::Oracle, Some(track)) => {
            Box::new(OraclePredictor::new(track.world_positions().to_vec()))
        }
        // Without an obstacle the predictor is never consulted.
        (PredictorKind::Oracle, None) => Box::new(ConstantVelocityPredictor::new(params.t_obs)),
        (PredictorKind::ConstantVelocity, _) => {
            Box::new(ConstantVelocityPredictor::new(params.t_obs))
        }
    };
    let timeline = run_dynaplan(&grid, start, goal, track.as_ref(), predictor.as_ref(), &params)?;

    let mut text = serde_json::to_string(&TimelineHeader { seed: ctx.seed })?;
    text.push('\n');
    for step in &timeline.steps {
        let (event, wait_steps) = match step.event {
            TimelineEvent::None => ("none", None),
            TimelineEvent::Replanned { wait_steps } => ("replanned", Some(wait_steps)),
            TimelineEvent::Waiting => ("waiting", None),
            TimelineEvent::GoalReached => ("goal_reached", None),
            TimelineEvent::BudgetExhausted => ("budget_exhausted", None),
        };
        let record = TimelineRecord {
            t: step.t,
            agent: [step.agent.0, step.agent.1],
            obstacle: step.obstacle.map(|o| [o.0, o.1]),
            event: event.to_string(),
            wait_steps,
        };
        text.push_str(&serde_json::to_string(&record)?);
        text.push('\n');
    }
    let summary = SummaryRecord {
        summary: TimelineSummary {
            replan_count: timeline.replan_count,
            wait_steps: timeline.wait_ticks,
            min_separation: timeline.min_separation,
            goal_reached: timeline.complete,
        },
    };
    text.push_str(&serde_json::to_string(&summary)?);
    text.push('\n');
    ctx.emit(&text)?;

    if timeline.complete {
        Ok(Outcome::Success)
    } else {
        eprintln!("timeline ended without reaching the goal");
        Ok(Outcome::Negative)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted motion files (JSON-lines), comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub pred: Vec<PathBuf>,
    /// Ground-truth motion files aligned with --pred, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub gt: Vec<PathBuf>,
    /// Skeleton file; the built-in 22-joint rig when omitted.
    #[arg(long)]
    pub skeleton: Option<PathBuf>,
    /// Object geometry as local-frame sample points, for contact and
    /// penetration metrics.
    #[arg(long)]
    pub object_points: Option<PathBuf>,
    /// Scene SDF grid, for the penetration metric.
    #[arg(long)]
    pub sdf: Option<PathBuf>,
    /// Feature file for the predicted set.
    #[arg(long)]
    pub pred_features: Option<PathBuf>,
    /// Feature file for the ground-truth set, aligned with --pred-features.
    #[arg(long)]
    pub gt_features: Option<PathBuf>,
    /// Retrieval pool size for R-precision.
    #[arg(long)]
    pub pool_size: Option<usize>,
    /// Sample this many feature pairs for diversity instead of all pairs.
    #[arg(long)]
    pub diversity_pairs: Option<usize>,
}

/// Per-pair scalars plus the label and point streams that are pooled across
/// pairs before averaging.
struct PairEval {
    t_s: f64,
    t_e: f64,
    h_feet: f64,
    foot_sliding: f64,
    floor_fallback: bool,
    mpjpe: f64,
    t_root: f64,
    t_obj: f64,
    o_obj: f64,
    pred_contact: Vec<bool>,
    gt_contact: Vec<bool>,
    pred_object_world: Vec<Vec<Vector3<f64>>>,
}

fn eval_pair(
    pred_path: &Path,
    gt_path: &Path,
    skeleton: &Skeleton,
    object_points: Option<&[Vector3<f64>]>,
    keep_object_world: bool,
) -> Result<PairEval> {
    let pred = formats::read_motion(pred_path)?;
    let gt = formats::read_motion(gt_path)?;
    if pred.frames() != gt.frames() {
        bail!(
            "{} has {} frames but {} has {}",
            pred_path.display(),
            pred.frames(),
            gt_path.display(),
            gt.frames()
        );
    }
    if pred.joint_count() != skeleton.joint_count() {
        bail!(
            "{} has {} joints but the skeleton has {}",
            pred_path.display(),
            pred.joint_count(),
            skeleton.joint_count()
        );
    }
    let frames = pred.frames();
    let pred_joints = pred.global_joints(skeleton)?;
    let gt_joints = gt.global_joints(skeleton)?;

    let (t_s, t_e) = condition_matching(
        &pred,
        gt.object_translation(0),
        gt.object_translation(frames - 1),
    );

    // Floor from the predicted toes; quasi-static needs both toes slow.
    let (lt, rt) = (skeleton.left_foot(), skeleton.right_foot());
    let (la, ra) = (skeleton.left_ankle(), skeleton.right_ankle());
    let toe_heights: Vec<[f64; 2]> =
        pred_joints.iter().map(|f| [f[lt].z, f[rt].z]).collect();
    let mut toe_speeds = vec![0.0; frames];
    for t in 1..frames {
        let dl = (pred_joints[t][lt] - pred_joints[t - 1][lt]).norm();
        let dr = (pred_joints[t][rt] - pred_joints[t - 1][rt]).norm();
        toe_speeds[t] = dl.max(dr);
    }
    let (floor, floor_fallback) =
        match estimate_floor(&toe_heights, &toe_speeds, QUASI_STATIC_SPEED, FLOOR_BIN_WIDTH) {
            Ok(z) => (z, false),
            Err(hoiplan_core::Error::NotEstimable(_)) => (0.0, true),
            Err(e) => return Err(e.into()),
        };
    let h_feet = foot_height(&toe_heights, floor);
    let tracks: Vec<[Vector3<f64>; 4]> = pred_joints
        .iter()
        .map(|f| [f[la], f[ra], f[lt], f[rt]])
        .collect();
    let fs = foot_sliding(&tracks, floor, &SLIDE_THRESHOLDS)?;

    let mpjpe_v = mpjpe(&pred_joints, &gt_joints)?;
    let pred_root: Vec<Vector3<f64>> = (0..frames).map(|t| *pred.root(t)).collect();
    let gt_root: Vec<Vector3<f64>> = (0..frames).map(|t| *gt.root(t)).collect();
    let t_root = translation_error(&pred_root, &gt_root)?;
    let pred_obj: Vec<Vector3<f64>> = (0..frames).map(|t| *pred.object_translation(t)).collect();
    let gt_obj: Vec<Vector3<f64>> = (0..frames).map(|t| *gt.object_translation(t)).collect();
    let t_obj = translation_error(&pred_obj, &gt_obj)?;
    let pred_rot: Vec<_> = (0..frames).map(|t| *pred.object_rotation(t)).collect();
    let gt_rot: Vec<_> = (0..frames).map(|t| *gt.object_rotation(t)).collect();
    let o_obj = orientation_error(&pred_rot, &gt_rot)?;

    let (lh, rh) = (skeleton.left_hand(), skeleton.right_hand());
    let (pred_contact, gt_contact, pred_object_world) = match object_points {
        Some(points) => {
            let pred_hands: Vec<[Vector3<f64>; 2]> =
                pred_joints.iter().map(|f| [f[lh], f[rh]]).collect();
            let gt_hands: Vec<[Vector3<f64>; 2]> =
                gt_joints.iter().map(|f| [f[lh], f[rh]]).collect();
            let pred_verts: Vec<Vec<Vector3<f64>>> =
                (0..frames).map(|t| pred.transform_object_points(t, points)).collect();
            let gt_verts: Vec<Vec<Vector3<f64>>> =
                (0..frames).map(|t| gt.transform_object_points(t, points)).collect();
            let pc = contact_labels(&pred_hands, &pred_verts)?;
            let gc = contact_labels(&gt_hands, &gt_verts)?;
            let world = if keep_object_world { pred_verts } else { Vec::new() };
            (pc, gc, world)
        }
        None => (Vec::new(), Vec::new(), Vec::new()),
    };

    Ok(PairEval {
        t_s,
        t_e,
        h_feet,
        foot_sliding: fs,
        floor_fallback,
        mpjpe: mpjpe_v,
        t_root,
        t_obj,
        o_obj,
        pred_contact,
        gt_contact,
        pred_object_world,
    })
}

/// Scores predicted motions against ground truth and writes a CSV metric
/// report. Per-pair metrics average over pairs; contact and penetration pool
/// frames across pairs; missing inputs mark dependent rows not-applicable.
pub fn cmd_eval(ctx: &Ctx, args: &EvalArgs) -> Result<Outcome> {
    if args.pred.len() != args.gt.len() {
        bail!("--pred lists {} files but --gt lists {}", args.pred.len(), args.gt.len());
    }
    if args.pred.is_empty() {
        bail!("--pred lists no files");
    }
    let skeleton = match &args.skeleton {
        Some(path) => formats::read_skeleton(path)?,
        None => Skeleton::humanoid22(),
    };
    let object_points = match &args.object_points {
        Some(path) => Some(formats::read_points(path)?),
        None => None,
    };
    let sdf: Option<SdfGrid> = match &args.sdf {
        Some(path) => Some(formats::read_sdf(path)?),
        None => None,
    };

    let n = args.pred.len();
    let pairs: Vec<PairEval> = (0..n)
        .into_par_iter()
        .map(|i| {
            eval_pair(
                &args.pred[i],
                &args.gt[i],
                &skeleton,
                object_points.as_deref(),
                sdf.is_some(),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    let mean = |f: &dyn Fn(&PairEval) -> f64| -> f64 {
        pairs.iter().map(|p| f(p)).sum::<f64>() / n as f64
    };
    let fallbacks = pairs.iter().filter(|p| p.floor_fallback).count();

    let mut report = MetricReport::new();
    report.add("t_s", mean(&|p| p.t_s), "cm");
    report.add("t_e", mean(&|p| p.t_e), "cm");
    let floor_note = format!("floor defaulted to 0 for {fallbacks} sequence(s)");
    if fallbacks > 0 {
        report.add_flagged("h_feet", mean(&|p| p.h_feet), "cm", &floor_note);
        report.add_flagged("foot_sliding", mean(&|p| p.foot_sliding), "cm", &floor_note);
    } else {
        report.add("h_feet", mean(&|p| p.h_feet), "cm");
        report.add("foot_sliding", mean(&|p| p.foot_sliding), "cm");
    }

    if object_points.is_some() {
        let pred_labels: Vec<bool> =
            pairs.iter().flat_map(|p| p.pred_contact.iter().copied()).collect();
        let gt_labels: Vec<bool> =
            pairs.iter().flat_map(|p| p.gt_contact.iter().copied()).collect();
        let cm = contact_metrics(&pred_labels, &gt_labels)?;
        if cm.precision_defined {
            report.add("c_prec", cm.precision, "ratio");
        } else {
            report.add_not_applicable("c_prec", "ratio", "no predicted contact frames");
        }
        if cm.recall_defined {
            report.add("c_rec", cm.recall, "ratio");
        } else {
            report.add_not_applicable("c_rec", "ratio", "no ground-truth contact frames");
        }
        if cm.f1_defined {
            report.add("c_f1", cm.f1, "ratio");
        } else {
            report.add_not_applicable("c_f1", "ratio", "precision or recall undefined");
        }
        report.add("c_pct", cm.contact_fraction, "ratio");
    } else {
        for name in ["c_prec", "c_rec", "c_f1", "c_pct"] {
            report.add_not_applicable(name, "ratio", "no object point file");
        }
    }

    match (&object_points, &sdf) {
        (Some(_), Some(sdf)) => {
            let all_frames: Vec<Vec<Vector3<f64>>> =
                pairs.iter().flat_map(|p| p.pred_object_world.iter().cloned()).collect();
            let pen = penetration(&all_frames, sdf, PenetrationAveraging::AllPoints)?;
            report.add("penetration", pen, "cm");
        }
        (None, Some(_)) => {
            report.add_not_applicable("penetration", "cm", "no object point file");
        }
        _ => report.add_not_applicable("penetration", "cm", "no sdf file"),
    }

    report.add("mpjpe", mean(&|p| p.mpjpe), "cm");
    report.add("t_root", mean(&|p| p.t_root), "cm");
    report.add("t_obj", mean(&|p| p.t_obj), "cm");
    report.add("o_obj", mean(&|p| p.o_obj), "frobenius");

    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    match (&args.pred_features, &args.gt_features) {
        (Some(pred_path), Some(gt_path)) => {
            let pred_features = formats::read_features(pred_path)?;
            let gt_features = formats::read_features(gt_path)?;
            report.add("fid", fid(&pred_features, &gt_features)?, "feature");
            if pred_features.len() >= 2 {
                let pairs_mode = match args.diversity_pairs.or(ctx.config.eval.diversity_pairs) {
                    Some(k) => DiversityPairs::Sampled(k),
                    None => DiversityPairs::Exhaustive,
                };
                report.add("diversity", diversity(&pred_features, pairs_mode, &mut rng)?, "feature");
            } else {
                report.add_not_applicable("diversity", "feature", "needs at least 2 features");
            }
            let pool = args.pool_size.or(ctx.config.eval.pool_size).unwrap_or(32);
            if pred_features.len() >= pool && gt_features.len() == pred_features.len() {
                let rp = r_precision(&gt_features, &pred_features, pool, &mut rng)?;
                report.add("r_precision", rp, "ratio");
            } else {
                report.add_not_applicable(
                    "r_precision",
                    "ratio",
                    &format!("needs {pool} aligned feature pairs"),
                );
            }
        }
        _ => {
            for (name, unit) in
                [("fid", "feature"), ("diversity", "feature"), ("r_precision", "ratio")]
            {
                report.add_not_applicable(name, unit, "no feature files");
            }
        }
    }

    let text = format!("# seed {}\n{}", ctx.seed, report.to_csv());
    ctx.emit(&text)?;
    Ok(Outcome::Success)
}

#[derive(Debug, Args)]
pub struct LandscapeArgs {
    /// Loss functional: quadratic, rosenbrock, or constant:<value>.
    pub loss: String,
    /// Slice radius along each direction.
    #[arg(long)]
    pub r: Option<f64>,
    /// Grid steps per axis.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Parameter dimension of the probe vector.
    #[arg(long)]
    pub dims: Option<usize>,
}

fn parse_loss(name: &str) -> Result<BuiltinLoss> {
    if name == "quadratic" {
        return Ok(BuiltinLoss::Quadratic);
    }
    if name == "rosenbrock" {
        return Ok(BuiltinLoss::Rosenbrock);
    }
    if let Some(value) = name.strip_prefix("constant:") {
        let v: f64 = value
            .parse()
            .with_context(|| format!("bad constant loss value '{value}'"))?;
        return Ok(BuiltinLoss::Constant(v));
    }
    bail!("unknown loss functional '{name}'; options: quadratic, rosenbrock, constant:<value>")
}

/// Samples a seeded 2-D slice of a built-in loss functional around the origin
/// and writes the (alpha, beta, loss) grid as CSV.
pub fn cmd_landscape(ctx: &Ctx, args: &LandscapeArgs) -> Result<Outcome> {
    let loss = parse_loss(&args.loss)?;
    let r = args.r.or(ctx.config.landscape.r).unwrap_or(1.0);
    let steps = args.steps.or(ctx.config.landscape.steps).unwrap_or(51);
    let dims = args.dims.or(ctx.config.landscape.dims).unwrap_or(16);
    if dims == 0 {
        bail!("dims must be positive");
    }
    let w0 = ParamVector::flat(vec![0.0; dims])?;
    // Directions are normalized against a unit-norm reference so the slice
    // has unit scale even though the probe center is the origin.
    let reference = ParamVector::flat(vec![1.0 / (dims as f64).sqrt(); dims])?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let d_x = sample_direction(&reference, &mut rng);
    let d_y_raw = sample_direction(&reference, &mut rng);
    let d_y = orthogonalize(&d_y_raw, &d_x)?;
    let grid = evaluate_grid(&w0, &d_x, &d_y, r, steps, &|w| loss.eval(w))?;
    let text = format!("# seed {}\n{}", ctx.seed, grid.to_csv());
    ctx.emit(&text)?;
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_parse_from_comma_pairs() {
        assert_eq!(parse_cell("3,17").unwrap(), Cell::new(3, 17));
        assert_eq!(parse_cell(" 2 , 5 ").unwrap(), Cell::new(2, 5));
        assert!(parse_cell("3").is_err());
        assert!(parse_cell("a,b").is_err());
        assert!(parse_cell("-1,2").is_err());
    }

    #[test]
    fn loss_names_parse_with_options_listed_on_error() {
        assert!(matches!(parse_loss("quadratic").unwrap(), BuiltinLoss::Quadratic));
        assert!(matches!(parse_loss("rosenbrock").unwrap(), BuiltinLoss::Rosenbrock));
        match parse_loss("constant:3.5").unwrap() {
            BuiltinLoss::Constant(v) => assert_eq!(v, 3.5),
            other => panic!("expected constant, got {other:?}"),
        }
        let err = parse_loss("cubic").unwrap_err().to_string();
        assert!(err.contains("quadratic"), "error should list options: {err}");
    }

    #[test]
    fn config_rejects_unknown_sections() {
        let err = serde_json::from_str::<RunConfig>("{\"plot\": {}}");
        assert!(err.is_err());
        let ok: RunConfig =
            serde_json::from_str("{\"plan\": {\"lambda_r\": 4.0}}").unwrap();
        assert_eq!(ok.plan.lambda_r, Some(4.0));
    }
}

//! File codecs shared by the command-line tools: scenes, scenarios, motion
//! clips, feature sets, skeletons, point sets, risk rasters, and SDF grids.
//!
//! Everything is line-oriented text (JSON or whitespace-separated numbers) so
//! outputs diff cleanly; only the SDF payload is binary. Parse errors carry
//! the file path and, for line-oriented formats, the offending line number.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::{Matrix3, Vector3};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use hoiplan_core::dynaplan::{DynaPlanParams, RiskMap};
use hoiplan_core::geometry::{Rotation6D, SdfGrid, Skeleton};
use hoiplan_core::metrics::{FeatureSet, MotionSequence};
use hoiplan_core::scene_grid::{rasterize_scene, Bounds, Footprint, OccupancyGrid};

/// Reads a whole-file JSON value with path context.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Scene description: world bounds, raster resolution, obstacle footprints.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    /// [xmin, ymin, xmax, ymax] in meters.
    pub bounds: [f64; 4],
    pub resolution: f64,
    #[serde(default)]
    pub footprints: Vec<FootprintSpec>,
}

/// Obstacle footprint, tagged by shape.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FootprintSpec {
    Rect { min: [f64; 2], max: [f64; 2] },
    Circle { center: [f64; 2], radius: f64 },
}

impl FootprintSpec {
    fn to_footprint(&self) -> Footprint {
        match *self {
            FootprintSpec::Rect { min, max } => {
                Footprint::Rect { min: (min[0], min[1]), max: (max[0], max[1]) }
            }
            FootprintSpec::Circle { center, radius } => {
                Footprint::Circle { center: (center[0], center[1]), radius }
            }
        }
    }
}

impl SceneFile {
    pub fn to_grid(&self) -> Result<OccupancyGrid> {
        let bounds = Bounds::new(
            (self.bounds[0], self.bounds[1]),
            (self.bounds[2], self.bounds[3]),
        );
        let footprints: Vec<Footprint> =
            self.footprints.iter().map(FootprintSpec::to_footprint).collect();
        Ok(rasterize_scene(bounds, self.resolution, &footprints)?)
    }
}

/// Replanning scenario: a scene (inline or by path), agent endpoints, an
/// optional obstacle waypoint script, and parameter overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scene: SceneRef,
    pub start: [usize; 2],
    pub goal: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    pub predictor: PredictorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamOverrides>,
}

/// Inline scene object, or a path resolved relative to the scenario file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SceneRef {
    Path(String),
    Inline(SceneFile),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictorKind {
    /// Replays the scripted track (known future).
    #[default]
    Oracle,
    /// Extrapolates the mean observed displacement.
    ConstantVelocity,
}

/// Optional overrides for the replanning parameters; unset fields keep the
/// defaults.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_w: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_obs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_pred: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_budget: Option<usize>,
}

impl ParamOverrides {
    pub fn apply(&self, mut base: DynaPlanParams) -> DynaPlanParams {
        if let Some(v) = self.sigma {
            base.sigma = v;
        }
        if let Some(v) = self.gamma {
            base.gamma = v;
        }
        if let Some(v) = self.lambda_r {
            base.lambda_r = v;
        }
        if let Some(v) = self.lambda_w {
            base.lambda_w = v;
        }
        if let Some(v) = self.agent_radius {
            base.agent_radius = v;
        }
        if let Some(v) = self.obstacle_radius {
            base.obstacle_radius = v;
        }
        if let Some(v) = self.t_obs {
            base.t_obs = v;
        }
        if let Some(v) = self.t_pred {
            base.t_pred = v;
        }
        if let Some(v) = self.step_budget {
            base.step_budget = v;
        }
        base
    }
}

/// Loads a scenario and rasterizes its scene. Path references resolve
/// relative to the scenario file's directory.
pub fn load_scenario(path: &Path) -> Result<(ScenarioFile, OccupancyGrid)> {
    let scenario: ScenarioFile = read_json(path)?;
    let grid = match &scenario.scene {
        SceneRef::Inline(scene) => scene
            .to_grid()
            .with_context(|| format!("rasterizing scene in {}", path.display()))?,
        SceneRef::Path(rel) => {
            let base = path.parent().unwrap_or_else(|| Path::new("."));
            let scene_path: PathBuf = base.join(rel);
            let scene: SceneFile = read_json(&scene_path)?;
            scene
                .to_grid()
                .with_context(|| format!("rasterizing {}", scene_path.display()))?
        }
    };
    Ok((scenario, grid))
}

/// One motion frame: root position, per-joint 6D rotations, and the object
/// rigid transform (rotation in row-major order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionFrame {
    pub t: usize,
    pub root: [f64; 3],
    pub joints6d: Vec<[f64; 6]>,
    pub obj_t: [f64; 3],
    #[serde(rename = "obj_R")]
    pub obj_r: [f64; 9],
}

/// Parses a JSON-lines motion file; frame indices must count up from zero.
pub fn read_motion_frames(path: &Path) -> Result<Vec<MotionFrame>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut frames = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let frame: MotionFrame = serde_json::from_str(line)
            .with_context(|| format!("{}:{}: bad motion frame", path.display(), i + 1))?;
        if frame.t != i {
            bail!("{}:{}: expected frame index {}, found {}", path.display(), i + 1, i, frame.t);
        }
        frames.push(frame);
    }
    if frames.is_empty() {
        bail!("{}: motion file has no frames", path.display());
    }
    Ok(frames)
}

pub fn frames_to_motion(frames: &[MotionFrame]) -> Result<MotionSequence> {
    let root = frames.iter().map(|f| Vector3::from(f.root)).collect();
    let joints6d = frames
        .iter()
        .map(|f| f.joints6d.iter().map(|r| Rotation6D(*r)).collect())
        .collect();
    let obj_t = frames.iter().map(|f| Vector3::from(f.obj_t)).collect();
    let obj_r = frames.iter().map(|f| Matrix3::from_row_slice(&f.obj_r)).collect();
    Ok(MotionSequence::new(root, joints6d, obj_t, obj_r)?)
}

pub fn motion_to_frames(motion: &MotionSequence) -> Vec<MotionFrame> {
    (0..motion.frames())
        .map(|t| {
            let m = motion.object_rotation(t);
            let mut obj_r = [0.0; 9];
            for r in 0..3 {
                for c in 0..3 {
                    obj_r[3 * r + c] = m[(r, c)];
                }
            }
            MotionFrame {
                t,
                root: (*motion.root(t)).into(),
                joints6d: motion.joint_rotations6d(t).iter().map(|r| r.0).collect(),
                obj_t: (*motion.object_translation(t)).into(),
                obj_r,
            }
        })
        .collect()
}

pub fn read_motion(path: &Path) -> Result<MotionSequence> {
    let frames = read_motion_frames(path)?;
    frames_to_motion(&frames).with_context(|| format!("validating {}", path.display()))
}

pub fn write_motion_frames(path: &Path, frames: &[MotionFrame]) -> Result<()> {
    let mut out = String::new();
    for frame in frames {
        out.push_str(&serde_json::to_string(frame)?);
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FeatureHeader {
    n: usize,
    d: usize,
}

/// Feature file: a JSON header line `{"n":…,"d":…}` followed by n lines of d
/// whitespace-separated floats.
pub fn read_features(path: &Path) -> Result<FeatureSet> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().enumerate();
    let (_, header_line) = lines
        .next()
        .with_context(|| format!("{}: empty feature file", path.display()))?;
    let header: FeatureHeader = serde_json::from_str(header_line)
        .with_context(|| format!("{}:1: bad feature header", path.display()))?;
    let mut rows = Vec::with_capacity(header.n);
    for (i, line) in lines {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("{}:{}: bad feature row", path.display(), i + 1))?;
        if row.len() != header.d {
            bail!(
                "{}:{}: expected {} values, found {}",
                path.display(),
                i + 1,
                header.d,
                row.len()
            );
        }
        rows.push(row);
    }
    if rows.len() != header.n {
        bail!("{}: header says {} rows, found {}", path.display(), header.n, rows.len());
    }
    FeatureSet::from_rows(rows).with_context(|| format!("validating {}", path.display()))
}

pub fn write_features(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    if rows.is_empty() {
        bail!("feature set must be non-empty");
    }
    let d = rows[0].len();
    let mut out = serde_json::to_string(&FeatureHeader { n: rows.len(), d })?;
    out.push('\n');
    for row in rows {
        if row.len() != d {
            bail!("feature rows must share a dimension");
        }
        let toks: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Skeleton file: parent indices, local offsets, and the distal end-effector
/// joints used by the contact and foot metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkeletonFile {
    pub parents: Vec<usize>,
    pub offsets: Vec<[f64; 3]>,
    pub distal: DistalJoints,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistalJoints {
    pub lhand: usize,
    pub rhand: usize,
    pub lfoot: usize,
    pub rfoot: usize,
}

impl SkeletonFile {
    pub fn to_skeleton(&self) -> Result<Skeleton> {
        let offsets = self.offsets.iter().map(|o| Vector3::from(*o)).collect();
        Ok(Skeleton::from_parts(
            self.parents.clone(),
            offsets,
            self.distal.lhand,
            self.distal.rhand,
            self.distal.lfoot,
            self.distal.rfoot,
        )?)
    }

    pub fn from_skeleton(skeleton: &Skeleton) -> Self {
        SkeletonFile {
            parents: skeleton.parents().to_vec(),
            offsets: skeleton.offsets().iter().map(|o| (*o).into()).collect(),
            distal: DistalJoints {
                lhand: skeleton.left_hand(),
                rhand: skeleton.right_hand(),
                lfoot: skeleton.left_foot(),
                rfoot: skeleton.right_foot(),
            },
        }
    }
}

pub fn read_skeleton(path: &Path) -> Result<Skeleton> {
    let file: SkeletonFile = read_json(path)?;
    file.to_skeleton().with_context(|| format!("validating {}", path.display()))
}

/// Point set file: one `x y z` triple per line.
pub fn read_points(path: &Path) -> Result<Vec<Vector3<f64>>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("{}:{}: bad point", path.display(), i + 1))?;
        if vals.len() != 3 {
            bail!("{}:{}: expected 3 values, found {}", path.display(), i + 1, vals.len());
        }
        points.push(Vector3::new(vals[0], vals[1], vals[2]));
    }
    if points.is_empty() {
        bail!("{}: point file has no points", path.display());
    }
    Ok(points)
}

pub fn write_points(path: &Path, points: &[Vector3<f64>]) -> Result<()> {
    let mut out = String::new();
    for p in points {
        out.push_str(&format!("{} {} {}\n", p.x, p.y, p.z));
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Risk raster: `height` lines of `width` whitespace-separated values, row 0
/// first. Dimensions must match the scene grid.
pub fn read_risk(path: &Path, width: usize, height: usize) -> Result<RiskMap> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::with_capacity(width * height);
    let mut rows = 0usize;
    for (i, line) in text.lines().enumerate() {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("{}:{}: bad risk row", path.display(), i + 1))?;
        if row.len() != width {
            bail!("{}:{}: expected {} values, found {}", path.display(), i + 1, width, row.len());
        }
        values.extend(row);
        rows += 1;
    }
    if rows != height {
        bail!("{}: expected {} rows, found {}", path.display(), height, rows);
    }
    RiskMap::from_values(width, height, values)
        .with_context(|| format!("validating {}", path.display()))
}

// SDF binary layout, all little-endian f32: dims (3), voxel size (1),
// origin (3), then dims[0]*dims[1]*dims[2] payload values with x fastest.
const SDF_HEADER_FLOATS: usize = 7;

/// Reads a binary SDF grid (values widen from f32 to f64).
pub fn read_sdf(path: &Path) -> Result<SdfGrid> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.len() < SDF_HEADER_FLOATS * 4 || bytes.len() % 4 != 0 {
        bail!("{}: truncated sdf header", path.display());
    }
    let floats: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    let mut dims = [0usize; 3];
    for (i, d) in dims.iter_mut().enumerate() {
        let v = floats[i];
        if !(v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= 1e7) {
            bail!("{}: bad sdf dimension {v}", path.display());
        }
        *d = v as usize;
    }
    let voxel_size = floats[3] as f64;
    let origin = Vector3::new(floats[4] as f64, floats[5] as f64, floats[6] as f64);
    let expected = dims[0] * dims[1] * dims[2];
    let payload = &floats[SDF_HEADER_FLOATS..];
    if payload.len() != expected {
        bail!("{}: expected {} sdf values, found {}", path.display(), expected, payload.len());
    }
    let values = payload.iter().map(|&v| v as f64).collect();
    SdfGrid::from_values(dims, voxel_size, origin, values)
        .with_context(|| format!("validating {}", path.display()))
}

/// Writes a binary SDF grid; values narrow from f64 to f32.
pub fn write_sdf(path: &Path, grid: &SdfGrid) -> Result<()> {
    let dims = grid.dims();
    let origin = grid.origin();
    let mut floats: Vec<f32> = vec![
        dims[0] as f32,
        dims[1] as f32,
        dims[2] as f32,
        grid.voxel_size() as f32,
        origin.x as f32,
        origin.y as f32,
        origin.z as f32,
    ];
    floats.extend(grid.values().iter().map(|&v| v as f32));
    let mut bytes = Vec::with_capacity(floats.len() * 4);
    for f in floats {
        bytes.extend_from_slice(&f.to_le_bytes());
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Output of the plan command: the path as cells and as a world polyline,
/// plus the cost summary.
#[derive(Debug, Serialize, Deserialize)]
pub struct PlanOutput {
    pub seed: u64,
    pub cells: Vec<[usize; 2]>,
    pub world: Vec<[f64; 2]>,
    pub cost: PlanCostOut,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PlanCostOut {
    pub step_length: f64,
    pub risk_term: f64,
    pub lambda_r: f64,
    pub total: f64,
}

/// First line of a timeline file.
#[derive(Debug, Serialize, Deserialize)]
pub struct TimelineHeader {
    pub seed: u64,
}

/// One timeline tick; positions are world coordinates at the start of the
/// tick. `wait_steps` is present only on replan records.
#[derive(Debug, Serialize, Deserialize)]
pub struct TimelineRecord {
    pub t: usize,
    pub agent: [f64; 2],
    pub obstacle: Option<[f64; 2]>,
    pub event: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wait_steps: Option<usize>,
}

/// Last line of a timeline file.
#[derive(Debug, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub summary: TimelineSummary,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TimelineSummary {
    pub replan_count: usize,
    pub wait_steps: usize,
    pub min_separation: Option<f64>,
    pub goal_reached: bool,
}

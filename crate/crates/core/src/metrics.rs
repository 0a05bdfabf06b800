//! Evaluation suite: condition matching, floor estimation, foot-ground
//! metrics, contact classification, penetration, pose errors, and
//! feature-distribution metrics over externally supplied embeddings.
//!
//! Per-sequence metrics are pure functions; distances the literature reports
//! in centimeters are returned in centimeters (inputs are meters).

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::Rng;

use crate::diffusion::{self, StateSeq};
use crate::error::{Error, Result};
use crate::geometry::{Rotation6D, Skeleton, SignedDistance};

/// Hands closer than this to the object are in contact (strict, meters).
pub const CONTACT_THRESHOLD: f64 = 0.05;
/// Toe speed below which a frame counts as quasi-static (m/frame).
pub const QUASI_STATIC_SPEED: f64 = 0.005;
/// Histogram bin width for floor clustering (meters).
pub const FLOOR_BIN_WIDTH: f64 = 0.01;
/// Foot-sliding height thresholds: left ankle, right ankle, left toe,
/// right toe (meters).
pub const SLIDE_THRESHOLDS: [f64; 4] = [0.08, 0.08, 0.04, 0.04];

const METERS_TO_CM: f64 = 100.0;

/// A human-object motion clip: per frame the human root position, per-joint
/// 6D rotations, and the object rigid transform. Global joint positions may
/// be attached to skip repeated kinematics.
#[derive(Debug, Clone)]
pub struct MotionSequence {
    root: Vec<Vector3<f64>>,
    joints6d: Vec<Vec<Rotation6D>>,
    obj_t: Vec<Vector3<f64>>,
    obj_r: Vec<Matrix3<f64>>,
    precomputed_joints: Option<Vec<Vec<Vector3<f64>>>>,
}

impl MotionSequence {
    pub fn new(
        root: Vec<Vector3<f64>>,
        joints6d: Vec<Vec<Rotation6D>>,
        obj_t: Vec<Vector3<f64>>,
        obj_r: Vec<Matrix3<f64>>,
    ) -> Result<Self> {
        let t = root.len();
        if t == 0 {
            return Err(Error::invalid("motion needs at least one frame"));
        }
        if joints6d.len() != t || obj_t.len() != t || obj_r.len() != t {
            return Err(Error::invalid("motion field lengths differ"));
        }
        let j = joints6d[0].len();
        if joints6d.iter().any(|f| f.len() != j) {
            return Err(Error::invalid("joint count varies across frames"));
        }
        let finite = root.iter().chain(&obj_t).all(|v| v.iter().all(|x| x.is_finite()))
            && joints6d.iter().flatten().all(|r| r.0.iter().all(|x| x.is_finite()))
            && obj_r.iter().all(|m| m.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(Error::invalid("motion entries must be finite"));
        }
        for (k, r) in obj_r.iter().enumerate() {
            let drift = (r.transpose() * r - Matrix3::identity()).abs().max();
            if drift > 1e-4 {
                return Err(Error::invalid(format!(
                    "object rotation at frame {k} is not orthonormal (drift {drift:.2e})"
                )));
            }
        }
        Ok(MotionSequence { root, joints6d, obj_t, obj_r, precomputed_joints: None })
    }

    /// Attach precomputed global joints (T x J x 3).
    pub fn with_joints(mut self, joints: Vec<Vec<Vector3<f64>>>) -> Result<Self> {
        if joints.len() != self.frames()
            || joints.iter().any(|f| f.len() != self.joint_count())
        {
            return Err(Error::invalid("precomputed joints shape mismatch"));
        }
        self.precomputed_joints = Some(joints);
        Ok(self)
    }

    pub fn frames(&self) -> usize {
        self.root.len()
    }

    pub fn joint_count(&self) -> usize {
        self.joints6d[0].len()
    }

    pub fn root(&self, t: usize) -> &Vector3<f64> {
        &self.root[t]
    }

    pub fn joint_rotations6d(&self, t: usize) -> &[Rotation6D] {
        &self.joints6d[t]
    }

    pub fn object_translation(&self, t: usize) -> &Vector3<f64> {
        &self.obj_t[t]
    }

    pub fn object_rotation(&self, t: usize) -> &Matrix3<f64> {
        &self.obj_r[t]
    }

    /// Global joint positions via forward kinematics (or the attached
    /// precomputed ones).
    pub fn global_joints(&self, skel: &Skeleton) -> Result<Vec<Vec<Vector3<f64>>>> {
        if let Some(j) = &self.precomputed_joints {
            return Ok(j.clone());
        }
        if skel.joint_count() != self.joint_count() {
            return Err(Error::invalid("skeleton joint count differs from motion"));
        }
        let mut out = Vec::with_capacity(self.frames());
        for t in 0..self.frames() {
            let rots = self.joints6d[t]
                .iter()
                .map(|r| r.to_matrix())
                .collect::<Result<Vec<_>>>()?;
            out.push(skel.forward_kinematics(&self.root[t], &rots)?);
        }
        Ok(out)
    }

    /// Object geometry in world coordinates at frame t.
    pub fn transform_object_points(&self, t: usize, points: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
        points.iter().map(|p| self.obj_r[t] * p + self.obj_t[t]).collect()
    }

    /// Decode from the full state representation (object position, row-major
    /// object rotation, root, per-joint 6D rotations).
    pub fn from_state(state: &StateSeq, joints: usize) -> Result<Self> {
        if state.dims() != diffusion::full_dims(joints) {
            return Err(Error::invalid(format!(
                "state dims {} do not match {} joints",
                state.dims(),
                joints
            )));
        }
        let t = state.frames();
        let mut root = Vec::with_capacity(t);
        let mut joints6d = Vec::with_capacity(t);
        let mut obj_t = Vec::with_capacity(t);
        let mut obj_r = Vec::with_capacity(t);
        for f in 0..t {
            let row = state.frame(f);
            obj_t.push(Vector3::new(row[0], row[1], row[2]));
            obj_r.push(Matrix3::new(
                row[3], row[4], row[5], row[6], row[7], row[8], row[9], row[10], row[11],
            ));
            root.push(Vector3::new(row[12], row[13], row[14]));
            let mut frame = Vec::with_capacity(joints);
            for j in 0..joints {
                let r = diffusion::joint6d_range(j);
                let six: [f64; 6] = row[r.start..r.end].try_into().expect("six wide");
                frame.push(Rotation6D(six));
            }
            joints6d.push(frame);
        }
        MotionSequence::new(root, joints6d, obj_t, obj_r)
    }

    /// Encode into the full state representation; inverse of `from_state`.
    pub fn to_state(&self) -> Result<StateSeq> {
        let joints = self.joint_count();
        let mut s = StateSeq::zeros(self.frames(), diffusion::full_dims(joints))?;
        for t in 0..self.frames() {
            for k in 0..3 {
                s.set(t, k, self.obj_t[t][k]);
                s.set(t, 12 + k, self.root[t][k]);
            }
            let r = &self.obj_r[t];
            for row in 0..3 {
                for col in 0..3 {
                    s.set(t, 3 + row * 3 + col, r[(row, col)]);
                }
            }
            for (j, rot) in self.joints6d[t].iter().enumerate() {
                for (k, v) in rot.0.iter().enumerate() {
                    s.set(t, diffusion::FULL_FIXED_DIMS + 6 * j + k, *v);
                }
            }
        }
        Ok(s)
    }
}

/// Start/end object-centroid errors in cm. The object translation is the
/// centroid under the convention that object geometry is centered locally.
pub fn condition_matching(
    pred: &MotionSequence,
    target_start: &Vector3<f64>,
    target_goal: &Vector3<f64>,
) -> (f64, f64) {
    let t_s = (pred.object_translation(0) - target_start).norm() * METERS_TO_CM;
    let t_e =
        (pred.object_translation(pred.frames() - 1) - target_goal).norm() * METERS_TO_CM;
    (t_s, t_e)
}

/// Floor height from quasi-static toe frames: bin the stance heights, take
/// maximal runs of adjacent non-empty bins as clusters, return the mean of
/// the lowest cluster.
pub fn estimate_floor(
    toe_heights: &[[f64; 2]],
    toe_speeds: &[f64],
    quasi_static_speed: f64,
    bin_width: f64,
) -> Result<f64> {
    if toe_heights.len() != toe_speeds.len() {
        return Err(Error::invalid("toe height and speed lengths differ"));
    }
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::invalid("bin width must be positive"));
    }
    let mut stance: Vec<f64> = Vec::new();
    for (h, s) in toe_heights.iter().zip(toe_speeds) {
        if *s < quasi_static_speed {
            stance.extend_from_slice(h);
        }
    }
    if stance.is_empty() {
        return Err(Error::NotEstimable("no quasi-static toe frames".into()));
    }
    let lo = stance.iter().cloned().fold(f64::INFINITY, f64::min);
    let bin_of = |z: f64| ((z - lo) / bin_width).floor() as i64;
    let mut bins: Vec<i64> = stance.iter().map(|z| bin_of(*z)).collect();
    bins.sort_unstable();
    bins.dedup();
    // The lowest cluster is the run of adjacent bins starting at bins[0].
    let mut end = bins[0];
    for b in &bins[1..] {
        if *b == end + 1 {
            end = *b;
        } else {
            break;
        }
    }
    let members: Vec<f64> =
        stance.iter().cloned().filter(|z| bin_of(*z) <= end).collect();
    Ok(members.iter().sum::<f64>() / members.len() as f64)
}

/// Mean absolute distance from the feet to the floor, in cm.
pub fn foot_height(feet_z: &[[f64; 2]], z_floor: f64) -> f64 {
    if feet_z.is_empty() {
        return 0.0;
    }
    let sum: f64 =
        feet_z.iter().map(|f| (f[0] - z_floor).abs() + (f[1] - z_floor).abs()).sum();
    sum / (feet_z.len() * 2) as f64 * METERS_TO_CM
}

/// Height-dependent sliding weight: 2 - 2^(z/h) below the threshold, 0 at or
/// above it (strict indicator).
pub fn sliding_weight(z: f64, h: f64) -> f64 {
    if z < h {
        2.0 - (z / h).exp2()
    } else {
        0.0
    }
}

/// Foot sliding in cm: horizontal displacement of near-floor joints weighted
/// by height, averaged over transitions and the four foot joints. `tracks`
/// rows follow the `SLIDE_THRESHOLDS` joint order.
pub fn foot_sliding(
    tracks: &[[Vector3<f64>; 4]],
    z_floor: f64,
    thresholds: &[f64; 4],
) -> Result<f64> {
    if tracks.len() < 2 {
        return Err(Error::invalid("foot sliding needs at least two frames"));
    }
    if thresholds.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(Error::invalid("height thresholds must be positive"));
    }
    let mut sum = 0.0;
    for t in 0..tracks.len() - 1 {
        for j in 0..4 {
            let z = tracks[t][j].z - z_floor;
            let dx = tracks[t + 1][j].x - tracks[t][j].x;
            let dy = tracks[t + 1][j].y - tracks[t][j].y;
            let d = (dx * dx + dy * dy).sqrt();
            sum += d * sliding_weight(z, thresholds[j]);
        }
    }
    Ok(sum / ((tracks.len() - 1) * 4) as f64 * METERS_TO_CM)
}

/// Per-frame contact labels: true iff any hand is strictly within the
/// contact threshold of any object vertex.
pub fn contact_labels(
    hand_joints: &[[Vector3<f64>; 2]],
    object_vertices: &[Vec<Vector3<f64>>],
) -> Result<Vec<bool>> {
    if hand_joints.len() != object_vertices.len() {
        return Err(Error::invalid("hand and vertex frame counts differ"));
    }
    if object_vertices.iter().any(|v| v.is_empty()) {
        return Err(Error::invalid("every frame needs at least one object vertex"));
    }
    Ok(hand_joints
        .iter()
        .zip(object_vertices)
        .map(|(hands, verts)| {
            hands
                .iter()
                .any(|h| verts.iter().any(|v| (h - v).norm() < CONTACT_THRESHOLD))
        })
        .collect())
}

/// Binary classification scores over the contact class. Undefined ratios
/// (zero denominators) are reported as 0 with the matching flag cleared.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Fraction of predicted frames labeled in-contact.
    pub contact_fraction: f64,
    pub precision_defined: bool,
    pub recall_defined: bool,
    pub f1_defined: bool,
}

pub fn contact_metrics(pred: &[bool], gt: &[bool]) -> Result<ContactMetrics> {
    if pred.len() != gt.len() {
        return Err(Error::invalid("label lengths differ"));
    }
    if pred.is_empty() {
        return Err(Error::invalid("labels must be non-empty"));
    }
    let tp = pred.iter().zip(gt).filter(|(p, g)| **p && **g).count() as f64;
    let fp = pred.iter().zip(gt).filter(|(p, g)| **p && !**g).count() as f64;
    let fn_ = pred.iter().zip(gt).filter(|(p, g)| !**p && **g).count() as f64;
    let precision_defined = tp + fp > 0.0;
    let recall_defined = tp + fn_ > 0.0;
    let precision = if precision_defined { tp / (tp + fp) } else { 0.0 };
    let recall = if recall_defined { tp / (tp + fn_) } else { 0.0 };
    let f1_defined = precision + recall > 0.0;
    let f1 = if f1_defined { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
    let contact_fraction = pred.iter().filter(|p| **p).count() as f64 / pred.len() as f64;
    Ok(ContactMetrics {
        precision,
        recall,
        f1,
        contact_fraction,
        precision_defined,
        recall_defined,
        f1_defined,
    })
}

/// Which points enter the penetration average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenetrationAveraging {
    /// Every sampled point; non-penetrating points contribute 0.
    AllPoints,
    /// Penetrating points only (0 when nothing penetrates).
    PenetratingOnly,
}

/// Mean penetration depth of the query points into the solid, in cm.
pub fn penetration(
    query_points: &[Vec<Vector3<f64>>],
    sdf: &dyn SignedDistance,
    averaging: PenetrationAveraging,
) -> Result<f64> {
    let mut depth_sum = 0.0;
    let mut total = 0usize;
    let mut penetrating = 0usize;
    for frame in query_points {
        for p in frame {
            let s = sdf.distance(p);
            if !s.is_finite() {
                return Err(Error::NumericFailure("signed distance is not finite".into()));
            }
            if s < 0.0 {
                depth_sum += -s;
                penetrating += 1;
            }
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::invalid("penetration needs at least one query point"));
    }
    let denom = match averaging {
        PenetrationAveraging::AllPoints => total,
        PenetrationAveraging::PenetratingOnly => penetrating.max(1),
    };
    Ok(depth_sum / denom as f64 * METERS_TO_CM)
}

/// Mean per-joint position error in cm.
pub fn mpjpe(pred: &[Vec<Vector3<f64>>], gt: &[Vec<Vector3<f64>>]) -> Result<f64> {
    if pred.len() != gt.len() || pred.is_empty() {
        return Err(Error::invalid("joint trajectory shapes differ"));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (pf, gf) in pred.iter().zip(gt) {
        if pf.len() != gf.len() {
            return Err(Error::invalid("joint trajectory shapes differ"));
        }
        for (p, g) in pf.iter().zip(gf) {
            sum += (p - g).norm();
            count += 1;
        }
    }
    Ok(sum / count as f64 * METERS_TO_CM)
}

/// Mean frame-wise Euclidean distance between two position tracks, in cm.
pub fn translation_error(pred: &[Vector3<f64>], gt: &[Vector3<f64>]) -> Result<f64> {
    if pred.len() != gt.len() || pred.is_empty() {
        return Err(Error::invalid("translation track lengths differ"));
    }
    let sum: f64 = pred.iter().zip(gt).map(|(p, g)| (p - g).norm()).sum();
    Ok(sum / pred.len() as f64 * METERS_TO_CM)
}

/// Mean Frobenius norm of the rotation difference; 0 for identical inputs,
/// 2*sqrt(2) at 180 degrees.
pub fn orientation_error(pred: &[Matrix3<f64>], gt: &[Matrix3<f64>]) -> Result<f64> {
    if pred.len() != gt.len() || pred.is_empty() {
        return Err(Error::invalid("rotation track lengths differ"));
    }
    let sum: f64 = pred.iter().zip(gt).map(|(p, g)| (p - g).norm()).sum();
    Ok(sum / pred.len() as f64)
}

/// N feature vectors of uniform dimension, supplied by an external
/// extractor.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl FeatureSet {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("feature set must be non-empty"));
        }
        let d = rows[0].len();
        if d == 0 || rows.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("feature rows must share a positive dimension"));
        }
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("features must be finite"));
        }
        Ok(FeatureSet { n: data.len() / d, d, data })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }
}

fn mean_and_covariance(set: &FeatureSet) -> (DVector<f64>, DMatrix<f64>) {
    let n = set.len();
    let d = set.dim();
    let mut mean = DVector::zeros(d);
    for i in 0..n {
        for (k, v) in set.row(i).iter().enumerate() {
            mean[k] += v;
        }
    }
    mean /= n as f64;
    let mut cov = DMatrix::zeros(d, d);
    for i in 0..n {
        let row = set.row(i);
        for a in 0..d {
            let da = row[a] - mean[a];
            for b in a..d {
                cov[(a, b)] += da * (row[b] - mean[b]);
            }
        }
    }
    cov /= (n - 1) as f64;
    for a in 0..d {
        for b in 0..a {
            cov[(a, b)] = cov[(b, a)];
        }
    }
    (mean, cov)
}

/// PSD square root via symmetric eigendecomposition; small negative
/// eigenvalues are clamped to zero (warns when clearly negative).
fn psd_sqrt(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let spectral = eig.eigenvalues.iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    let mut vals = eig.eigenvalues.clone();
    for l in vals.iter_mut() {
        if *l < -1e-6 * spectral {
            log::warn!("clamping negative eigenvalue {l:.3e} in matrix square root");
        }
        *l = l.max(0.0).sqrt();
    }
    &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
}

/// Frechet distance between Gaussian fits of two feature sets.
pub fn fid(a: &FeatureSet, b: &FeatureSet) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::invalid("feature dimensions differ"));
    }
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::invalid("distribution metrics need at least two samples"));
    }
    let (mu_a, cov_a) = mean_and_covariance(a);
    let (mu_b, cov_b) = mean_and_covariance(b);
    let sqrt_a = psd_sqrt(&cov_a);
    let inner = &sqrt_a * &cov_b * &sqrt_a;
    let cross = psd_sqrt(&inner);
    let mean_term = (&mu_a - &mu_b).norm_squared();
    let value = mean_term + cov_a.trace() + cov_b.trace() - 2.0 * cross.trace();
    Ok(value.max(0.0))
}

/// How pairs are chosen for the diversity average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiversityPairs {
    /// All distinct unordered pairs.
    Exhaustive,
    /// This many uniformly sampled distinct index pairs.
    Sampled(usize),
}

/// Mean Euclidean distance over feature pairs.
pub fn diversity<R: Rng + ?Sized>(
    features: &FeatureSet,
    pairs: DiversityPairs,
    rng: &mut R,
) -> Result<f64> {
    let n = features.len();
    if n < 2 {
        return Err(Error::invalid("diversity needs at least two features"));
    }
    let dist = |i: usize, j: usize| -> f64 {
        features
            .row(i)
            .iter()
            .zip(features.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    match pairs {
        DiversityPairs::Exhaustive => {
            let mut sum = 0.0;
            let mut count = 0usize;
            for i in 0..n {
                for j in i + 1..n {
                    sum += dist(i, j);
                    count += 1;
                }
            }
            Ok(sum / count as f64)
        }
        DiversityPairs::Sampled(count) => {
            if count == 0 {
                return Err(Error::invalid("pair count must be positive"));
            }
            let mut sum = 0.0;
            for _ in 0..count {
                let i = rng.gen_range(0..n);
                let j = loop {
                    let j = rng.gen_range(0..n);
                    if j != i {
                        break j;
                    }
                };
                sum += dist(i, j);
            }
            Ok(sum / count as f64)
        }
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na * nb)
}

/// Fraction of queries whose paired motion ranks in the top 3 of a seeded
/// pool by cosine similarity. Ties resolve in favor of the paired motion.
pub fn r_precision<R: Rng + ?Sized>(
    text_features: &FeatureSet,
    motion_features: &FeatureSet,
    pool_size: usize,
    rng: &mut R,
) -> Result<f64> {
    let n = text_features.len();
    if motion_features.len() != n {
        return Err(Error::invalid("text and motion feature counts differ"));
    }
    if text_features.dim() != motion_features.dim() {
        return Err(Error::invalid("text and motion feature dimensions differ"));
    }
    if pool_size < 2 {
        return Err(Error::invalid("pool size must be at least 2"));
    }
    if n < pool_size {
        return Err(Error::invalid(format!(
            "need at least {pool_size} sequences for the pool, got {n}"
        )));
    }
    let mut hits = 0usize;
    for i in 0..n {
        let text = text_features.row(i);
        let gt_sim = cosine(text, motion_features.row(i));
        // Pool: the paired motion plus pool_size-1 seeded distinct others.
        let others = rand::seq::index::sample(rng, n - 1, pool_size - 1);
        let mut better = 0usize;
        for k in others.iter() {
            let j = if k >= i { k + 1 } else { k };
            if cosine(text, motion_features.row(j)) > gt_sim {
                better += 1;
            }
        }
        if better < 3 {
            hits += 1;
        }
    }
    Ok(hits as f64 / n as f64)
}

/// Named scalar results with units; metrics that could not be computed are
/// carried as not-applicable with a note.
#[derive(Debug, Clone, Default)]
pub struct MetricReport {
    rows: Vec<MetricRow>,
}

#[derive(Debug, Clone)]
pub struct MetricRow {
    pub name: String,
    pub value: Option<f64>,
    pub unit: String,
    pub note: Option<String>,
}

impl MetricReport {
    pub fn new() -> Self {
        MetricReport::default()
    }

    pub fn add(&mut self, name: &str, value: f64, unit: &str) {
        self.rows.push(MetricRow {
            name: name.into(),
            value: Some(value),
            unit: unit.into(),
            note: None,
        });
    }

    pub fn add_flagged(&mut self, name: &str, value: f64, unit: &str, note: &str) {
        self.rows.push(MetricRow {
            name: name.into(),
            value: Some(value),
            unit: unit.into(),
            note: Some(note.into()),
        });
    }

    pub fn add_not_applicable(&mut self, name: &str, unit: &str, note: &str) {
        self.rows.push(MetricRow {
            name: name.into(),
            value: None,
            unit: unit.into(),
            note: Some(note.into()),
        });
    }

    pub fn rows(&self) -> &[MetricRow] {
        &self.rows
    }

    pub fn get(&self, name: &str) -> Option<&MetricRow> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// CSV with a fixed header; not-applicable values serialize as `na`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,value,unit,note\n");
        for r in &self.rows {
            let value = match r.value {
                Some(v) => format!("{v}"),
                None => "na".into(),
            };
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.name,
                value,
                r.unit,
                r.note.as_deref().unwrap_or("")
            ));
        }
        out
    }
}

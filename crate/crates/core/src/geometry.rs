//! Rotation encoding, skeletal kinematics, signed distance fields, and basis
//! point set encodings.
//!
//! Rotations travel through the model as the first two columns of the
//! rotation matrix (six numbers); decoding re-orthonormalizes, so every
//! decoded rotation is exactly orthogonal with determinant +1 even when the
//! six inputs drift off the manifold.

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::edt::squared_edt_3d;
use crate::error::{Error, Result};

/// Threshold under which a basis vector is considered degenerate.
const DEGENERATE_NORM: f64 = 1e-8;

/// Six-number rotation representation: the first two columns of the matrix
/// in column-major order `[r11, r21, r31, r12, r22, r32]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation6D(pub [f64; 6]);

impl Rotation6D {
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Rotation6D([m[(0, 0)], m[(1, 0)], m[(2, 0)], m[(0, 1)], m[(1, 1)], m[(2, 1)]])
    }

    /// Gram-Schmidt decode. The first column is normalized, the second is
    /// made orthogonal to it and normalized, and the third is their cross
    /// product, so the result is always a proper rotation.
    pub fn to_matrix(&self) -> Result<Matrix3<f64>> {
        let a1 = Vector3::new(self.0[0], self.0[1], self.0[2]);
        let a2 = Vector3::new(self.0[3], self.0[4], self.0[5]);
        if !a1.iter().chain(a2.iter()).all(|v| v.is_finite()) {
            return Err(Error::invalid("rotation encoding must be finite"));
        }
        let n1 = a1.norm();
        if n1 < DEGENERATE_NORM {
            return Err(Error::NumericFailure("first rotation column is near zero".into()));
        }
        let b1 = a1 / n1;
        let proj = a2 - b1 * b1.dot(&a2);
        let n2 = proj.norm();
        if n2 < DEGENERATE_NORM {
            return Err(Error::NumericFailure(
                "rotation columns are near parallel".into(),
            ));
        }
        let b2 = proj / n2;
        let b3 = b1.cross(&b2);
        Ok(Matrix3::from_columns(&[b1, b2, b3]))
    }
}

/// Rigid skeleton: per-joint parent indices and rest offsets from the parent.
/// Joint 0 is the root (its own parent); every other joint's parent precedes
/// it, so a single forward pass computes global transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    parents: Vec<usize>,
    offsets: Vec<Vector3<f64>>,
    left_hand: usize,
    right_hand: usize,
    left_foot: usize,
    right_foot: usize,
}

impl Skeleton {
    pub fn from_parts(
        parents: Vec<usize>,
        offsets: Vec<Vector3<f64>>,
        left_hand: usize,
        right_hand: usize,
        left_foot: usize,
        right_foot: usize,
    ) -> Result<Self> {
        if parents.is_empty() {
            return Err(Error::invalid("skeleton needs at least one joint"));
        }
        if parents.len() != offsets.len() {
            return Err(Error::invalid("parents and offsets must have equal length"));
        }
        if parents[0] != 0 {
            return Err(Error::invalid("joint 0 must be its own parent"));
        }
        for (j, &p) in parents.iter().enumerate().skip(1) {
            if p >= j {
                return Err(Error::invalid(format!(
                    "joint {j} has parent {p}; parents must precede children"
                )));
            }
        }
        if offsets.iter().any(|o| !(o.x.is_finite() && o.y.is_finite() && o.z.is_finite())) {
            return Err(Error::invalid("offsets must be finite"));
        }
        let n = parents.len();
        for (name, idx) in [
            ("left hand", left_hand),
            ("right hand", right_hand),
            ("left foot", left_foot),
            ("right foot", right_foot),
        ] {
            if idx >= n {
                return Err(Error::invalid(format!("{name} index {idx} out of range")));
            }
        }
        Ok(Skeleton { parents, offsets, left_hand, right_hand, left_foot, right_foot })
    }

    pub fn joint_count(&self) -> usize {
        self.parents.len()
    }

    pub fn parents(&self) -> &[usize] {
        &self.parents
    }

    pub fn offsets(&self) -> &[Vector3<f64>] {
        &self.offsets
    }

    pub fn left_hand(&self) -> usize {
        self.left_hand
    }

    pub fn right_hand(&self) -> usize {
        self.right_hand
    }

    pub fn left_foot(&self) -> usize {
        self.left_foot
    }

    pub fn right_foot(&self) -> usize {
        self.right_foot
    }

    /// Ankle joints, taken as the parents of the distal foot joints.
    pub fn left_ankle(&self) -> usize {
        self.parents[self.left_foot]
    }

    pub fn right_ankle(&self) -> usize {
        self.parents[self.right_foot]
    }

    /// Global joint positions for a root translation and per-joint local
    /// rotations (joint 0's rotation orients the whole body).
    pub fn forward_kinematics(
        &self,
        root_position: &Vector3<f64>,
        local_rotations: &[Matrix3<f64>],
    ) -> Result<Vec<Vector3<f64>>> {
        let n = self.joint_count();
        if local_rotations.len() != n {
            return Err(Error::invalid(format!(
                "expected {n} rotations, got {}",
                local_rotations.len()
            )));
        }
        let mut global_rot = vec![Matrix3::identity(); n];
        let mut global_pos = vec![Vector3::zeros(); n];
        global_rot[0] = local_rotations[0];
        global_pos[0] = *root_position;
        for j in 1..n {
            let p = self.parents[j];
            global_pos[j] = global_pos[p] + global_rot[p] * self.offsets[j];
            global_rot[j] = global_rot[p] * local_rotations[j];
        }
        Ok(global_pos)
    }

    /// A 22-joint z-up humanoid in a T-pose, used as the default rig. Distal
    /// markers: toes for the feet, wrists for the hands.
    pub fn humanoid22() -> Self {
        let parents = vec![
            0, // 0 pelvis
            0, // 1 left hip
            0, // 2 right hip
            0, // 3 spine1
            1, // 4 left knee
            2, // 5 right knee
            3, // 6 spine2
            4, // 7 left ankle
            5, // 8 right ankle
            6, // 9 spine3
            7, // 10 left toe
            8, // 11 right toe
            9, // 12 neck
            12, // 13 left collar
            12, // 14 right collar
            12, // 15 head
            13, // 16 left shoulder
            14, // 17 right shoulder
            16, // 18 left elbow
            17, // 19 right elbow
            18, // 20 left wrist
            19, // 21 right wrist
        ];
        let o = |x: f64, y: f64, z: f64| Vector3::new(x, y, z);
        let offsets = vec![
            o(0.0, 0.0, 0.0),
            o(0.09, 0.0, -0.06),
            o(-0.09, 0.0, -0.06),
            o(0.0, 0.0, 0.11),
            o(0.0, 0.0, -0.40),
            o(0.0, 0.0, -0.40),
            o(0.0, 0.0, 0.12),
            o(0.0, 0.0, -0.42),
            o(0.0, 0.0, -0.42),
            o(0.0, 0.0, 0.13),
            o(0.0, 0.13, -0.05),
            o(0.0, 0.13, -0.05),
            o(0.0, 0.0, 0.10),
            o(0.07, 0.0, 0.02),
            o(-0.07, 0.0, 0.02),
            o(0.0, 0.0, 0.12),
            o(0.11, 0.0, 0.0),
            o(-0.11, 0.0, 0.0),
            o(0.26, 0.0, 0.0),
            o(-0.26, 0.0, 0.0),
            o(0.25, 0.0, 0.0),
            o(-0.25, 0.0, 0.0),
        ];
        Skeleton::from_parts(parents, offsets, 20, 21, 10, 11)
            .expect("the built-in rig is valid")
    }
}

/// Signed distance to a solid: negative inside, zero on the surface.
pub trait SignedDistance {
    fn distance(&self, p: &Vector3<f64>) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub struct SphereSdf {
    pub center: Vector3<f64>,
    pub radius: f64,
}

impl SignedDistance for SphereSdf {
    fn distance(&self, p: &Vector3<f64>) -> f64 {
        (p - self.center).norm() - self.radius
    }
}

/// Axis-aligned box given by center and half extents.
#[derive(Debug, Clone, Copy)]
pub struct BoxSdf {
    pub center: Vector3<f64>,
    pub half_extents: Vector3<f64>,
}

impl SignedDistance for BoxSdf {
    fn distance(&self, p: &Vector3<f64>) -> f64 {
        let q = (p - self.center).abs() - self.half_extents;
        let outside = Vector3::new(q.x.max(0.0), q.y.max(0.0), q.z.max(0.0)).norm();
        let inside = q.x.max(q.y).max(q.z).min(0.0);
        outside + inside
    }
}

/// Dense signed distance samples on a regular grid, interpolated trilinearly.
/// `origin` is the world position of voxel (0, 0, 0)'s center; data is laid
/// out with x fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SdfGrid {
    dims: [usize; 3],
    voxel_size: f64,
    origin: Vector3<f64>,
    values: Vec<f64>,
}

impl SdfGrid {
    pub fn from_values(
        dims: [usize; 3],
        voxel_size: f64,
        origin: Vector3<f64>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::invalid("grid dimensions must be positive"));
        }
        if !(voxel_size.is_finite() && voxel_size > 0.0) {
            return Err(Error::invalid("voxel size must be positive"));
        }
        let n = dims[0] * dims[1] * dims[2];
        if values.len() != n {
            return Err(Error::invalid(format!("expected {n} values, got {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid values must be finite"));
        }
        Ok(SdfGrid { dims, voxel_size, origin, values })
    }

    /// Two-sided distance transform of a voxelized solid: positive outside
    /// (distance to the nearest solid voxel center), negative inside.
    pub fn from_voxels(
        solid: &[bool],
        dims: [usize; 3],
        voxel_size: f64,
        origin: Vector3<f64>,
    ) -> Result<Self> {
        let n = dims[0] * dims[1] * dims[2];
        if solid.len() != n {
            return Err(Error::invalid(format!("expected {n} voxels, got {}", solid.len())));
        }
        let outside = squared_edt_3d(solid, dims);
        let empty: Vec<bool> = solid.iter().map(|s| !s).collect();
        let inside = squared_edt_3d(&empty, dims);
        let values = solid
            .iter()
            .zip(outside.iter().zip(inside.iter()))
            .map(|(&is_solid, (&d_out, &d_in))| {
                // An all-solid or all-empty grid has an infinite complement
                // distance; treat it as flat zero on the missing side.
                if is_solid {
                    -if d_in.is_finite() { d_in.sqrt() * voxel_size } else { 0.0 }
                } else if d_out.is_finite() {
                    d_out.sqrt() * voxel_size
                } else {
                    0.0
                }
            })
            .collect();
        SdfGrid::from_values(dims, voxel_size, origin, values)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn voxel_size(&self) -> f64 {
        self.voxel_size
    }

    pub fn origin(&self) -> Vector3<f64> {
        self.origin
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn at(&self, x: usize, y: usize, z: usize) -> f64 {
        self.values[(z * self.dims[1] + y) * self.dims[0] + x]
    }
}

impl SignedDistance for SdfGrid {
    /// Trilinear interpolation inside the grid. Outside, the query is clamped
    /// to the boundary and the Euclidean distance to the clamped point is
    /// added, which keeps the field a conservative outside estimate.
    fn distance(&self, p: &Vector3<f64>) -> f64 {
        let g = (p - self.origin) / self.voxel_size;
        let max = [
            self.dims[0] as f64 - 1.0,
            self.dims[1] as f64 - 1.0,
            self.dims[2] as f64 - 1.0,
        ];
        let clamped = Vector3::new(
            g.x.clamp(0.0, max[0]),
            g.y.clamp(0.0, max[1]),
            g.z.clamp(0.0, max[2]),
        );
        let excess = (g - clamped).norm() * self.voxel_size;

        let base = [
            (clamped.x.floor() as usize).min(self.dims[0] - 1),
            (clamped.y.floor() as usize).min(self.dims[1] - 1),
            (clamped.z.floor() as usize).min(self.dims[2] - 1),
        ];
        let next = [
            (base[0] + 1).min(self.dims[0] - 1),
            (base[1] + 1).min(self.dims[1] - 1),
            (base[2] + 1).min(self.dims[2] - 1),
        ];
        let f = [
            clamped.x - base[0] as f64,
            clamped.y - base[1] as f64,
            clamped.z - base[2] as f64,
        ];

        let mut value = 0.0;
        for (zi, wz) in [(base[2], 1.0 - f[2]), (next[2], f[2])] {
            for (yi, wy) in [(base[1], 1.0 - f[1]), (next[1], f[1])] {
                for (xi, wx) in [(base[0], 1.0 - f[0]), (next[0], f[0])] {
                    value += wz * wy * wx * self.at(xi, yi, zi);
                }
            }
        }
        value + excess
    }
}

/// Fixed set of basis points in a ball, used to encode point clouds as
/// nearest-distance vectors. The layout depends only on the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisPointSet {
    points: Vec<Vector3<f64>>,
    radius: f64,
}

impl BasisPointSet {
    /// Rejection-samples `count` points uniformly from a ball. The default
    /// encoding uses 1024 points in the unit ball.
    pub fn new(seed: u64, count: usize, radius: f64) -> Result<Self> {
        if count == 0 {
            return Err(Error::invalid("basis point count must be positive"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid("basis radius must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(count);
        while points.len() < count {
            let x = rng.gen_range(-1.0..1.0);
            let y = rng.gen_range(-1.0..1.0);
            let z = rng.gen_range(-1.0..1.0);
            let v = Vector3::new(x, y, z);
            if v.norm_squared() <= 1.0 {
                points.push(v * radius);
            }
        }
        Ok(BasisPointSet { points, radius })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    /// Distance from each basis point to its nearest cloud point.
    pub fn encode(&self, cloud: &[Vector3<f64>]) -> Result<Vec<f64>> {
        if cloud.is_empty() {
            return Err(Error::invalid("cannot encode an empty point cloud"));
        }
        Ok(self
            .points
            .iter()
            .map(|b| {
                cloud
                    .iter()
                    .map(|p| (p - b).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .collect())
    }
}

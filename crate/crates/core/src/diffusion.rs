//! Noise schedules, forward corruption, DDPM reverse sampling with clean-
//! sequence prediction, conditioning masks for the decoupled two-stage
//! pipeline, and inference-time reconstruction guidance.
//!
//! States are dense T x D arrays. Two layouts are used: the trajectory
//! representation (D = 6: object position, human root position) and the full
//! representation (D = 15 + 6J: object position, object rotation row-major,
//! human root, then one 6D rotation per joint).

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::geometry::{Rotation6D, Skeleton};

/// Per-frame width of the trajectory representation.
pub const TRAJ_DIMS: usize = 6;
/// Fixed prefix of the full representation before the joint rotations.
pub const FULL_FIXED_DIMS: usize = 15;

/// Per-frame width of the full representation for a rig with `joints` joints.
pub fn full_dims(joints: usize) -> usize {
    FULL_FIXED_DIMS + 6 * joints
}

/// Object position slots (both representations).
pub fn obj_pos_range() -> std::ops::Range<usize> {
    0..3
}

/// Object rotation slots, row-major 3x3 (full representation).
pub fn obj_rot_range() -> std::ops::Range<usize> {
    3..12
}

/// Human root position slots in the trajectory representation.
pub fn traj_root_range() -> std::ops::Range<usize> {
    3..6
}

/// Human root position slots in the full representation.
pub fn full_root_range() -> std::ops::Range<usize> {
    12..15
}

/// Slots of joint `j`'s 6D rotation in the full representation.
pub fn joint6d_range(j: usize) -> std::ops::Range<usize> {
    let s = FULL_FIXED_DIMS + 6 * j;
    s..s + 6
}

/// Dense T x D state, row-major by frame.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSeq {
    frames: usize,
    dims: usize,
    values: Vec<f64>,
}

impl StateSeq {
    pub fn zeros(frames: usize, dims: usize) -> Result<Self> {
        if frames == 0 || dims == 0 {
            return Err(Error::invalid("state must have at least one frame and one dim"));
        }
        Ok(StateSeq { frames, dims, values: vec![0.0; frames * dims] })
    }

    pub fn from_values(frames: usize, dims: usize, values: Vec<f64>) -> Result<Self> {
        if frames == 0 || dims == 0 {
            return Err(Error::invalid("state must have at least one frame and one dim"));
        }
        if values.len() != frames * dims {
            return Err(Error::invalid(format!(
                "expected {} values, got {}",
                frames * dims,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("state entries must be finite"));
        }
        Ok(StateSeq { frames, dims, values })
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn get(&self, t: usize, d: usize) -> f64 {
        self.values[t * self.dims + d]
    }

    pub fn set(&mut self, t: usize, d: usize, v: f64) {
        self.values[t * self.dims + d] = v;
    }

    pub fn frame(&self, t: usize) -> &[f64] {
        &self.values[t * self.dims..(t + 1) * self.dims]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn same_shape(&self, other: &StateSeq) -> bool {
        self.frames == other.frames && self.dims == other.dims
    }

    /// Standard-normal state of the given shape.
    pub fn noise<R: Rng + ?Sized>(frames: usize, dims: usize, rng: &mut R) -> Result<Self> {
        let mut s = StateSeq::zeros(frames, dims)?;
        for v in s.values.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        Ok(s)
    }
}

/// Boolean mask over a state; true entries are held clean: never noised and
/// restored from the condition after every denoising step.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionMask {
    frames: usize,
    dims: usize,
    mask: Vec<bool>,
}

impl ConditionMask {
    pub fn none(frames: usize, dims: usize) -> Result<Self> {
        if frames == 0 || dims == 0 {
            return Err(Error::invalid("mask must have at least one frame and one dim"));
        }
        Ok(ConditionMask { frames, dims, mask: vec![false; frames * dims] })
    }

    pub fn all(frames: usize, dims: usize) -> Result<Self> {
        let mut m = ConditionMask::none(frames, dims)?;
        m.mask.iter_mut().for_each(|b| *b = true);
        Ok(m)
    }

    /// Trajectory-stage conditioning: the whole start frame plus the object
    /// position of the end frame.
    pub fn trajectory_stage(frames: usize) -> Result<Self> {
        let mut m = ConditionMask::none(frames, TRAJ_DIMS)?;
        for d in 0..TRAJ_DIMS {
            m.set(0, d, true);
        }
        for d in obj_pos_range() {
            m.set(frames - 1, d, true);
        }
        Ok(m)
    }

    /// Full-stage conditioning: the whole start frame plus the trajectory
    /// slots (object position and human root) of every frame.
    pub fn full_stage(frames: usize, joints: usize) -> Result<Self> {
        let dims = full_dims(joints);
        let mut m = ConditionMask::none(frames, dims)?;
        for d in 0..dims {
            m.set(0, d, true);
        }
        for t in 0..frames {
            for d in obj_pos_range().chain(full_root_range()) {
                m.set(t, d, true);
            }
        }
        Ok(m)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn get(&self, t: usize, d: usize) -> bool {
        self.mask[t * self.dims + d]
    }

    pub fn set(&mut self, t: usize, d: usize, v: bool) {
        self.mask[t * self.dims + d] = v;
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    fn matches(&self, s: &StateSeq) -> bool {
        self.frames == s.frames() && self.dims == s.dims()
    }
}

/// Beta schedule with cached cumulative products and posterior variances.
/// Step indices are 1-based (step n uses beta[n-1]); `alpha_bar(0)` is 1 by
/// convention.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    beta: Vec<f64>,
    alpha_bar: Vec<f64>,
    posterior_var: Vec<f64>,
}

impl NoiseSchedule {
    pub fn from_betas(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::invalid("schedule needs at least one step"));
        }
        if beta.iter().any(|b| !(b.is_finite() && *b > 0.0 && *b < 1.0)) {
            return Err(Error::invalid("every beta must lie strictly inside (0, 1)"));
        }
        let n = beta.len();
        let mut alpha_bar = Vec::with_capacity(n + 1);
        alpha_bar.push(1.0);
        for (i, b) in beta.iter().enumerate() {
            alpha_bar.push(alpha_bar[i] * (1.0 - b));
        }
        // posterior_var[n] = beta_n * (1 - abar_{n-1}) / (1 - abar_n);
        // index 0 is padding so the array is 1-based like the steps.
        let mut posterior_var = vec![0.0; n + 1];
        for i in 1..=n {
            posterior_var[i] = beta[i - 1] * (1.0 - alpha_bar[i - 1]) / (1.0 - alpha_bar[i]);
        }
        Ok(NoiseSchedule { beta, alpha_bar, posterior_var })
    }

    /// Linear interpolation from `beta_start` to `beta_end` over `n` steps.
    pub fn linear(n: usize, beta_start: f64, beta_end: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("schedule needs at least one step"));
        }
        if !(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0) {
            return Err(Error::invalid("need 0 < beta_start <= beta_end < 1"));
        }
        let beta = (0..n)
            .map(|i| {
                if n == 1 {
                    beta_start
                } else {
                    beta_start + (beta_end - beta_start) * i as f64 / (n - 1) as f64
                }
            })
            .collect();
        NoiseSchedule::from_betas(beta)
    }

    /// The default schedule: 1000 steps, beta from 1e-4 to 2e-2.
    pub fn default_linear() -> Self {
        NoiseSchedule::linear(1000, 1e-4, 2e-2).expect("default schedule parameters are valid")
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    fn check_step(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.len() {
            return Err(Error::OutOfRange(format!(
                "step {n} outside 1..={}",
                self.len()
            )));
        }
        Ok(())
    }

    pub fn beta(&self, n: usize) -> f64 {
        self.beta[n - 1]
    }

    pub fn alpha(&self, n: usize) -> f64 {
        1.0 - self.beta[n - 1]
    }

    /// Cumulative product up to step n; `alpha_bar(0) == 1`.
    pub fn alpha_bar(&self, n: usize) -> f64 {
        self.alpha_bar[n]
    }

    pub fn posterior_variance(&self, n: usize) -> f64 {
        self.posterior_var[n]
    }
}

/// x_n = sqrt(abar_n) x0 + sqrt(1 - abar_n) noise. Step 0 returns x0.
pub fn forward_sample(
    x0: &StateSeq,
    n: usize,
    noise: &StateSeq,
    sched: &NoiseSchedule,
) -> Result<StateSeq> {
    if !x0.same_shape(noise) {
        return Err(Error::invalid("x0 and noise shapes differ"));
    }
    if n > sched.len() {
        return Err(Error::OutOfRange(format!("step {n} outside 0..={}", sched.len())));
    }
    if n == 0 {
        return Ok(x0.clone());
    }
    let ab = sched.alpha_bar(n);
    let signal = ab.sqrt();
    let spread = (1.0 - ab).sqrt();
    let mut out = x0.clone();
    for (o, e) in out.values_mut().iter_mut().zip(noise.values()) {
        *o = signal * *o + spread * *e;
    }
    Ok(out)
}

/// One reverse step: the posterior mean of x_{n-1} given (x_n, x0_hat) plus
/// sigma_n * noise. Step 1 is deterministic (zero posterior variance).
pub fn reverse_step(
    x_n: &StateSeq,
    n: usize,
    x0_hat: &StateSeq,
    sched: &NoiseSchedule,
    noise: &StateSeq,
) -> Result<StateSeq> {
    sched.check_step(n)?;
    if !x_n.same_shape(x0_hat) || !x_n.same_shape(noise) {
        return Err(Error::invalid("reverse step shapes differ"));
    }
    let beta = sched.beta(n);
    let alpha = sched.alpha(n);
    let ab_prev = sched.alpha_bar(n - 1);
    let ab = sched.alpha_bar(n);
    let c0 = ab_prev.sqrt() * beta / (1.0 - ab);
    let cn = alpha.sqrt() * (1.0 - ab_prev) / (1.0 - ab);
    let sigma = sched.posterior_variance(n).sqrt();
    let mut out = x_n.clone();
    for i in 0..out.values().len() {
        let mu = c0 * x0_hat.values()[i] + cn * x_n.values()[i];
        out.values_mut()[i] = mu + sigma * noise.values()[i];
    }
    Ok(out)
}

/// out = mask ? clean : x.
pub fn apply_mask(x: &StateSeq, clean: &StateSeq, mask: &ConditionMask) -> Result<StateSeq> {
    if !x.same_shape(clean) || !mask.matches(x) {
        return Err(Error::invalid("mask application shapes differ"));
    }
    let mut out = x.clone();
    for t in 0..x.frames() {
        for d in 0..x.dims() {
            if mask.get(t, d) {
                out.set(t, d, clean.get(t, d));
            }
        }
    }
    Ok(out)
}

/// Predicts the clean sequence from a noisy one at step n.
pub trait Denoiser {
    fn denoise(&self, x_n: &StateSeq, n: usize, condition: &StateSeq) -> Result<StateSeq>;
}

/// Returns a fixed target regardless of input; sampling with it collapses to
/// the target.
#[derive(Debug, Clone)]
pub struct OracleDenoiser {
    pub target: StateSeq,
}

impl Denoiser for OracleDenoiser {
    fn denoise(&self, _x_n: &StateSeq, _n: usize, _condition: &StateSeq) -> Result<StateSeq> {
        Ok(self.target.clone())
    }
}

/// Oracle plus deterministic per-step perturbation; exercises code paths
/// where the estimate moves between steps.
#[derive(Debug, Clone)]
pub struct NoisyOracleDenoiser {
    pub target: StateSeq,
    pub scale: f64,
}

impl Denoiser for NoisyOracleDenoiser {
    fn denoise(&self, _x_n: &StateSeq, n: usize, _condition: &StateSeq) -> Result<StateSeq> {
        let mut out = self.target.clone();
        for (i, v) in out.values_mut().iter_mut().enumerate() {
            // Cheap deterministic pseudo-noise from (step, index).
            let h = (n as u64).wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(i as u64);
            let u = (h.wrapping_mul(0xbf58476d1ce4e5b9) >> 11) as f64 / (1u64 << 53) as f64;
            *v += self.scale * (2.0 * u - 1.0);
        }
        Ok(out)
    }
}

/// The posterior-mean estimate under a standard-normal prior on x0:
/// x0_hat = sqrt(abar_n) x_n. Keeps samples distributed like the prior.
#[derive(Debug, Clone)]
pub struct AffineShrinkageDenoiser {
    pub sched: NoiseSchedule,
}

impl Denoiser for AffineShrinkageDenoiser {
    fn denoise(&self, x_n: &StateSeq, n: usize, _condition: &StateSeq) -> Result<StateSeq> {
        self.sched.check_step(n)?;
        let c = self.sched.alpha_bar(n).sqrt();
        let mut out = x_n.clone();
        out.values_mut().iter_mut().for_each(|v| *v *= c);
        Ok(out)
    }
}

/// Scalar objective for reconstruction guidance. `anchor` carries the
/// estimate used to freeze per-step discrete choices (contact masks, nearest
/// vertices); `x` is where the objective is evaluated, so finite differences
/// in `x` see a smooth function.
pub trait GuidanceObjective {
    fn value_at(&self, anchor: &StateSeq, x: &StateSeq) -> Result<f64>;

    /// Analytic gradient with the same frozen choices, if implemented.
    fn gradient_at(&self, anchor: &StateSeq, x: &StateSeq) -> Result<Option<Vec<f64>>> {
        let _ = (anchor, x);
        Ok(None)
    }
}

/// Central finite-difference step for objectives without analytic gradients.
const FD_STEP: f64 = 1e-4;

/// One guidance update: x0_hat - alpha * sigma_sq * grad F(x0_hat).
/// Discrete choices inside the objective are frozen at x0_hat.
pub fn guidance_update(
    x0_hat: &StateSeq,
    objective: &dyn GuidanceObjective,
    alpha: f64,
    sigma_sq: f64,
) -> Result<StateSeq> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid("guidance strength must be non-negative"));
    }
    if alpha == 0.0 {
        return Ok(x0_hat.clone());
    }
    let grad = match objective.gradient_at(x0_hat, x0_hat)? {
        Some(g) => {
            if g.len() != x0_hat.values().len() {
                return Err(Error::ContractViolation(
                    "objective gradient length mismatch".into(),
                ));
            }
            g
        }
        None => {
            let mut g = vec![0.0; x0_hat.values().len()];
            let mut probe = x0_hat.clone();
            for i in 0..g.len() {
                let base = x0_hat.values()[i];
                probe.values_mut()[i] = base + FD_STEP;
                let hi = objective.value_at(x0_hat, &probe)?;
                probe.values_mut()[i] = base - FD_STEP;
                let lo = objective.value_at(x0_hat, &probe)?;
                probe.values_mut()[i] = base;
                g[i] = (hi - lo) / (2.0 * FD_STEP);
            }
            g
        }
    };
    if grad.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericFailure("guidance gradient is not finite".into()));
    }
    let mut out = x0_hat.clone();
    let step = alpha * sigma_sq;
    for (o, g) in out.values_mut().iter_mut().zip(grad.iter()) {
        *o -= step * g;
    }
    Ok(out)
}

/// Guidance configuration for sampling: objective, strength, and the first
/// (highest) step at which guidance applies.
pub struct Guidance<'a> {
    pub objective: &'a dyn GuidanceObjective,
    pub alpha: f64,
    /// Guidance applies at steps n <= start_step; usize::MAX means all steps.
    pub start_step: usize,
}

/// DDPM sampling loop. Starts from masked standard normal noise; each step
/// denoises, optionally applies guidance to the clean estimate, takes a
/// reverse step, and restores the conditioned entries.
pub fn sample<R: Rng + ?Sized>(
    denoiser: &dyn Denoiser,
    condition: &StateSeq,
    mask: &ConditionMask,
    sched: &NoiseSchedule,
    guidance: Option<&Guidance<'_>>,
    rng: &mut R,
) -> Result<StateSeq> {
    if !mask.matches(condition) {
        return Err(Error::invalid("mask and condition shapes differ"));
    }
    let (t, d) = (condition.frames(), condition.dims());
    let mut x = StateSeq::noise(t, d, rng)?;
    x = apply_mask(&x, condition, mask)?;
    for n in (1..=sched.len()).rev() {
        let mut x0_hat = denoiser.denoise(&x, n, condition)?;
        if !x0_hat.same_shape(&x) {
            return Err(Error::ContractViolation(format!(
                "denoiser returned {}x{}, expected {}x{}",
                x0_hat.frames(),
                x0_hat.dims(),
                t,
                d
            )));
        }
        if let Some(g) = guidance {
            if n <= g.start_step {
                x0_hat =
                    guidance_update(&x0_hat, g.objective, g.alpha, sched.posterior_variance(n))?;
            }
        }
        let noise = if n > 1 {
            StateSeq::noise(t, d, rng)?
        } else {
            StateSeq::zeros(t, d)?
        };
        x = reverse_step(&x, n, &x0_hat, sched, &noise)?;
        x = apply_mask(&x, condition, mask)?;
    }
    Ok(x)
}

/// How the trajectory stage is driven in `generate_interaction`.
pub enum TrajectorySource<'a> {
    /// Sample trajectories with the trajectory-stage denoiser.
    Sampled(&'a dyn Denoiser),
    /// Teacher forcing: use these ground-truth trajectories and skip the
    /// trajectory stage entirely.
    TeacherForced(&'a StateSeq),
}

/// Extracts the T x 6 trajectory (object position, human root) from a
/// full-representation state.
pub fn extract_trajectory(full: &StateSeq) -> Result<StateSeq> {
    if full.dims() < FULL_FIXED_DIMS {
        return Err(Error::invalid("state is narrower than the full representation"));
    }
    let t = full.frames();
    let mut out = StateSeq::zeros(t, TRAJ_DIMS)?;
    for f in 0..t {
        for (k, d) in obj_pos_range().enumerate() {
            out.set(f, k, full.get(f, d));
        }
        for (k, d) in full_root_range().enumerate() {
            out.set(f, 3 + k, full.get(f, d));
        }
    }
    Ok(out)
}

/// Writes a T x 6 trajectory into the trajectory slots of a full state.
pub fn write_trajectory(full: &mut StateSeq, traj: &StateSeq) -> Result<()> {
    if traj.dims() != TRAJ_DIMS || traj.frames() != full.frames() {
        return Err(Error::ContractViolation(format!(
            "trajectory is {}x{}, expected {}x{}",
            traj.frames(),
            traj.dims(),
            full.frames(),
            TRAJ_DIMS
        )));
    }
    if full.dims() < FULL_FIXED_DIMS {
        return Err(Error::invalid("state is narrower than the full representation"));
    }
    for f in 0..traj.frames() {
        for (k, d) in obj_pos_range().enumerate() {
            full.set(f, d, traj.get(f, k));
        }
        for (k, d) in full_root_range().enumerate() {
            full.set(f, d, traj.get(f, 3 + k));
        }
    }
    Ok(())
}

/// Two-stage generation: sample object/root trajectories first, write them
/// into the full-stage condition slots, then sample the full state with those
/// slots held clean. Teacher forcing substitutes ground-truth trajectories
/// and never invokes the trajectory denoiser.
pub fn generate_interaction<R: Rng + ?Sized>(
    trajectory: TrajectorySource<'_>,
    full_denoiser: &dyn Denoiser,
    condition: &StateSeq,
    joints: usize,
    sched: &NoiseSchedule,
    guidance: Option<&Guidance<'_>>,
    rng: &mut R,
) -> Result<StateSeq> {
    if condition.dims() != full_dims(joints) {
        return Err(Error::invalid(format!(
            "condition dims {} do not match the {}-joint full representation ({})",
            condition.dims(),
            joints,
            full_dims(joints)
        )));
    }
    let t = condition.frames();
    let traj = match trajectory {
        TrajectorySource::Sampled(tg) => {
            let tg_condition = extract_trajectory(condition)?;
            let tg_mask = ConditionMask::trajectory_stage(t)?;
            sample(tg, &tg_condition, &tg_mask, sched, None, rng)?
        }
        TrajectorySource::TeacherForced(gt) => {
            if gt.dims() != TRAJ_DIMS || gt.frames() != t {
                return Err(Error::ContractViolation(format!(
                    "ground-truth trajectory is {}x{}, expected {}x{}",
                    gt.frames(),
                    gt.dims(),
                    t,
                    TRAJ_DIMS
                )));
            }
            gt.clone()
        }
    };
    let mut full_condition = condition.clone();
    write_trajectory(&mut full_condition, &traj)?;
    let full_mask = ConditionMask::full_stage(t, joints)?;
    sample(full_denoiser, &full_condition, &full_mask, sched, guidance, rng)
}

/// Contact objective: per frame and hand, the L1 distance between the hand
/// and its nearest object vertex, for hands within the contact threshold.
/// Masks and nearest-vertex choices are frozen from the anchor state.
pub struct ContactObjective<'a> {
    pub skeleton: &'a Skeleton,
    /// Object geometry in object-local coordinates.
    pub object_points: &'a [Vector3<f64>],
    /// Activation threshold on hand-vertex distance, meters.
    pub threshold: f64,
}

/// Feet objective: per frame, |min(left z, right z) - h| for distal foot
/// joints, summed over frames.
pub struct FeetObjective<'a> {
    pub skeleton: &'a Skeleton,
    /// Target height above the floor, meters.
    pub floor_offset: f64,
}

/// Decodes one full-representation frame into FK inputs. The object rotation
/// is taken as stored (row-major), joint rotations go through the 6D decode.
pub fn decode_frame(
    state: &StateSeq,
    t: usize,
    joints: usize,
) -> Result<(Vector3<f64>, Matrix3<f64>, Vector3<f64>, Vec<Matrix3<f64>>)> {
    if state.dims() != full_dims(joints) {
        return Err(Error::invalid(format!(
            "state dims {} do not match {} joints",
            state.dims(),
            joints
        )));
    }
    let f = state.frame(t);
    let obj_pos = Vector3::new(f[0], f[1], f[2]);
    let obj_rot = Matrix3::new(f[3], f[4], f[5], f[6], f[7], f[8], f[9], f[10], f[11]);
    let root = Vector3::new(f[12], f[13], f[14]);
    let mut rots = Vec::with_capacity(joints);
    for j in 0..joints {
        let r = joint6d_range(j);
        let six: [f64; 6] = f[r.start..r.end].try_into().expect("range is six wide");
        rots.push(Rotation6D(six).to_matrix()?);
    }
    Ok((obj_pos, obj_rot, root, rots))
}

fn hand_positions(
    skeleton: &Skeleton,
    state: &StateSeq,
    t: usize,
) -> Result<[Vector3<f64>; 2]> {
    let (_, _, root, rots) = decode_frame(state, t, skeleton.joint_count())?;
    let joints = skeleton.forward_kinematics(&root, &rots)?;
    Ok([joints[skeleton.left_hand()], joints[skeleton.right_hand()]])
}

fn object_vertices(
    object_points: &[Vector3<f64>],
    state: &StateSeq,
    t: usize,
    joints: usize,
) -> Result<Vec<Vector3<f64>>> {
    let (obj_pos, obj_rot, _, _) = decode_frame(state, t, joints)?;
    Ok(object_points.iter().map(|p| obj_rot * p + obj_pos).collect())
}

impl GuidanceObjective for ContactObjective<'_> {
    fn value_at(&self, anchor: &StateSeq, x: &StateSeq) -> Result<f64> {
        if self.object_points.is_empty() {
            return Err(Error::invalid("contact objective needs object points"));
        }
        let joints = self.skeleton.joint_count();
        let mut total = 0.0;
        for t in 0..x.frames() {
            // Freeze mask and nearest-vertex index from the anchor.
            let anchor_hands = hand_positions(self.skeleton, anchor, t)?;
            let anchor_verts = object_vertices(self.object_points, anchor, t, joints)?;
            let hands = hand_positions(self.skeleton, x, t)?;
            let verts = object_vertices(self.object_points, x, t, joints)?;
            for hand in 0..2 {
                let (nearest, dist) = anchor_verts
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (i, (anchor_hands[hand] - v).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .expect("vertex set is non-empty");
                if dist < self.threshold {
                    let delta = hands[hand] - verts[nearest];
                    total += delta.x.abs() + delta.y.abs() + delta.z.abs();
                }
            }
        }
        Ok(total)
    }
}

impl GuidanceObjective for FeetObjective<'_> {
    fn value_at(&self, _anchor: &StateSeq, x: &StateSeq) -> Result<f64> {
        let mut total = 0.0;
        for t in 0..x.frames() {
            let (_, _, root, rots) = decode_frame(x, t, self.skeleton.joint_count())?;
            let joints = self.skeleton.forward_kinematics(&root, &rots)?;
            let lz = joints[self.skeleton.left_foot()].z;
            let rz = joints[self.skeleton.right_foot()].z;
            total += (lz.min(rz) - self.floor_offset).abs();
        }
        Ok(total)
    }
}

/// Sum of independent objectives.
pub struct SumObjective<'a>(pub Vec<&'a dyn GuidanceObjective>);

impl GuidanceObjective for SumObjective<'_> {
    fn value_at(&self, anchor: &StateSeq, x: &StateSeq) -> Result<f64> {
        self.0.iter().try_fold(0.0, |acc, o| Ok(acc + o.value_at(anchor, x)?))
    }
}

/// Contact formula on extracted positions: per frame and hand, masked L1
/// distance between the hand and its designated vertex.
pub fn f_contact(
    hands: &[[Vector3<f64>; 2]],
    nearest: &[[Vector3<f64>; 2]],
    masks: &[[bool; 2]],
) -> Result<f64> {
    if hands.len() != nearest.len() || hands.len() != masks.len() {
        return Err(Error::invalid("contact inputs must have equal frame counts"));
    }
    let mut total = 0.0;
    for t in 0..hands.len() {
        for hand in 0..2 {
            if masks[t][hand] {
                let d = hands[t][hand] - nearest[t][hand];
                total += d.x.abs() + d.y.abs() + d.z.abs();
            }
        }
    }
    Ok(total)
}

/// Gradient of `f_contact` with respect to the hand positions (sign pattern
/// on masked hands; exact zeros contribute zero).
pub fn f_contact_grad(
    hands: &[[Vector3<f64>; 2]],
    nearest: &[[Vector3<f64>; 2]],
    masks: &[[bool; 2]],
) -> Result<Vec<[Vector3<f64>; 2]>> {
    if hands.len() != nearest.len() || hands.len() != masks.len() {
        return Err(Error::invalid("contact inputs must have equal frame counts"));
    }
    let sign = |v: f64| {
        if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        }
    };
    Ok((0..hands.len())
        .map(|t| {
            let mut g = [Vector3::zeros(), Vector3::zeros()];
            for hand in 0..2 {
                if masks[t][hand] {
                    let d = hands[t][hand] - nearest[t][hand];
                    g[hand] = Vector3::new(sign(d.x), sign(d.y), sign(d.z));
                }
            }
            g
        })
        .collect())
}

/// Feet formula: per frame, |min(left z, right z) - h|, summed over frames.
pub fn f_feet(feet: &[[Vector3<f64>; 2]], h: f64) -> Result<f64> {
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::invalid("floor threshold must be non-negative"));
    }
    Ok(feet.iter().map(|f| (f[0].z.min(f[1].z) - h).abs()).sum())
}

/// Gradient of `f_feet` with respect to the foot z coordinates. The lower
/// foot carries the whole derivative; ties go to the left foot.
pub fn f_feet_grad(feet: &[[Vector3<f64>; 2]], h: f64) -> Result<Vec<[f64; 2]>> {
    if !(h.is_finite() && h >= 0.0) {
        return Err(Error::invalid("floor threshold must be non-negative"));
    }
    let sign = |v: f64| {
        if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        }
    };
    Ok(feet
        .iter()
        .map(|f| {
            let s = sign(f[0].z.min(f[1].z) - h);
            if f[0].z <= f[1].z {
                [s, 0.0]
            } else {
                [0.0, s]
            }
        })
        .collect())
}

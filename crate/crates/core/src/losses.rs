//! Training-time objective formulas: reconstruction and forward-kinematic
//! losses, per-frame adversarial hinge losses, discriminator input assembly,
//! the weighted total, and the adaptive adversarial-weight schedule.
//!
//! Everything here is a pure formula over caller-supplied values; there is
//! no optimizer or autodiff machinery. Score sequences are plain `&[f64]`
//! slices validated at use.

use std::collections::VecDeque;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffusion::StateSeq;
use crate::error::{Error, Result};
use crate::geometry::Skeleton;
use crate::metrics::MotionSequence;

/// Number of object surface points fed to the discriminator.
pub const DISCRIMINATOR_POINTS: usize = 64;
/// Adversarial weight bounds under the adaptive schedule.
pub const LAMBDA_G_MIN: f64 = 0.01;
pub const LAMBDA_G_MAX: f64 = 0.05;

/// Scalar weights balancing the loss terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub lambda_tg: f64,
    pub lambda_ag: f64,
    pub lambda_fk: f64,
    pub lambda_g: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        LossWeights { lambda_tg: 0.1, lambda_ag: 1.0, lambda_fk: 1.0, lambda_g: 0.03 }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [self.lambda_tg, self.lambda_ag, self.lambda_fk, self.lambda_g];
        if all.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("loss weights must be non-negative"));
        }
        Ok(())
    }
}

/// Mean absolute difference over all entries.
pub fn l1_recon(pred: &StateSeq, target: &StateSeq) -> Result<f64> {
    if !pred.same_shape(target) {
        return Err(Error::invalid("reconstruction shapes differ"));
    }
    let sum: f64 =
        pred.values().iter().zip(target.values()).map(|(a, b)| (a - b).abs()).sum();
    Ok(sum / pred.values().len() as f64)
}

/// L1 distance between predicted and target distal-joint positions, where
/// the predictions run through forward kinematics. Summed over frames and
/// both hands/feet.
pub fn fk_loss(
    skel: &Skeleton,
    pred_roots: &[Vector3<f64>],
    pred_rotations: &[Vec<Matrix3<f64>>],
    target_hands: &[[Vector3<f64>; 2]],
    target_feet: &[[Vector3<f64>; 2]],
) -> Result<f64> {
    let t = pred_roots.len();
    if pred_rotations.len() != t || target_hands.len() != t || target_feet.len() != t {
        return Err(Error::invalid("fk loss frame counts differ"));
    }
    let l1 = |a: &Vector3<f64>, b: &Vector3<f64>| {
        (a.x - b.x).abs() + (a.y - b.y).abs() + (a.z - b.z).abs()
    };
    let mut sum = 0.0;
    for f in 0..t {
        let joints = skel.forward_kinematics(&pred_roots[f], &pred_rotations[f])?;
        sum += l1(&joints[skel.left_hand()], &target_hands[f][0]);
        sum += l1(&joints[skel.right_hand()], &target_hands[f][1]);
        sum += l1(&joints[skel.left_foot()], &target_feet[f][0]);
        sum += l1(&joints[skel.right_foot()], &target_feet[f][1]);
    }
    Ok(sum)
}

fn check_scores(s: &[f64]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::invalid("score sequence must be non-empty"));
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("scores must be finite"));
    }
    Ok(())
}

/// Discriminator hinge loss: (1/T) sum of [1 - s_real]_+ + [1 + s_fake]_+.
pub fn hinge_d_loss(s_real: &[f64], s_fake: &[f64]) -> Result<f64> {
    check_scores(s_real)?;
    check_scores(s_fake)?;
    if s_real.len() != s_fake.len() {
        return Err(Error::invalid("real and fake score lengths differ"));
    }
    let sum: f64 = s_real
        .iter()
        .zip(s_fake)
        .map(|(r, f)| (1.0 - r).max(0.0) + (1.0 + f).max(0.0))
        .sum();
    Ok(sum / s_real.len() as f64)
}

/// Generator adversarial loss: -(1/T) sum of fake scores.
pub fn gen_adv_loss(s_fake: &[f64]) -> Result<f64> {
    check_scores(s_fake)?;
    Ok(-s_fake.iter().sum::<f64>() / s_fake.len() as f64)
}

/// Deterministic farthest-point subset of a point cloud: a seeded random
/// start, then greedy max-min selection.
pub fn farthest_point_sample(
    points: &[Vector3<f64>],
    m: usize,
    seed: u64,
) -> Result<Vec<Vector3<f64>>> {
    if m == 0 {
        return Err(Error::invalid("sample count must be positive"));
    }
    if points.len() < m {
        return Err(Error::invalid(format!(
            "cannot sample {m} points from a cloud of {}",
            points.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.gen_range(0..points.len());
    let mut chosen = vec![first];
    let mut dist: Vec<f64> =
        points.iter().map(|p| (p - points[first]).norm_squared()).collect();
    while chosen.len() < m {
        let (next, _) = dist
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("cloud is non-empty");
        chosen.push(next);
        for (d, p) in dist.iter_mut().zip(points) {
            *d = d.min((p - points[next]).norm_squared());
        }
    }
    Ok(chosen.into_iter().map(|i| points[i]).collect())
}

/// Per-frame discriminator features: hand positions (6), foot positions (6),
/// then the object points carried through the frame's rigid transform (3M).
pub fn discriminator_input(
    motion: &MotionSequence,
    object_points: &[Vector3<f64>],
    skel: &Skeleton,
) -> Result<Vec<Vec<f64>>> {
    if object_points.is_empty() {
        return Err(Error::invalid("discriminator needs at least one object point"));
    }
    let joints = motion.global_joints(skel)?;
    let mut rows = Vec::with_capacity(motion.frames());
    for t in 0..motion.frames() {
        let mut row = Vec::with_capacity(12 + 3 * object_points.len());
        for idx in [skel.left_hand(), skel.right_hand(), skel.left_foot(), skel.right_foot()] {
            row.extend_from_slice(joints[t][idx].as_slice());
        }
        for p in motion.transform_object_points(t, object_points) {
            row.extend_from_slice(p.as_slice());
        }
        rows.push(row);
    }
    Ok(rows)
}

/// The four loss terms entering the weighted total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParts {
    pub tg: f64,
    pub ag: f64,
    pub fk: f64,
    pub g: f64,
}

/// Weighted sum of the loss parts.
pub fn total_loss(parts: &LossParts, w: &LossWeights) -> Result<f64> {
    w.validate()?;
    let all = [parts.tg, parts.ag, parts.fk, parts.g];
    if all.iter().any(|p| !p.is_finite()) {
        return Err(Error::invalid("loss parts must be finite"));
    }
    Ok(w.lambda_tg * parts.tg + w.lambda_ag * parts.ag + w.lambda_fk * parts.fk
        + w.lambda_g * parts.g)
}

/// One step of the adaptive adversarial-weight rule: strengthen the
/// generator objective while the discriminator is accurate, back off while
/// it is losing, and stay inside the documented band.
pub fn adapt_lambda_g(current: f64, d_accuracy: f64) -> f64 {
    let next = if d_accuracy > 0.8 {
        current * 1.05
    } else if d_accuracy < 0.6 {
        current / 1.05
    } else {
        current
    };
    next.clamp(LAMBDA_G_MIN, LAMBDA_G_MAX)
}

/// Sliding window of discriminator correctness over recent updates. A frame
/// counts as correct when its score has the hinge-consistent sign: positive
/// for real frames, negative for fake ones.
#[derive(Debug, Clone)]
pub struct AccuracyWindow {
    per_update: VecDeque<(usize, usize)>,
    capacity: usize,
}

impl Default for AccuracyWindow {
    fn default() -> Self {
        AccuracyWindow::new(100)
    }
}

impl AccuracyWindow {
    pub fn new(capacity: usize) -> Self {
        AccuracyWindow { per_update: VecDeque::with_capacity(capacity), capacity: capacity.max(1) }
    }

    /// Record one update's real and fake frame scores.
    pub fn record(&mut self, s_real: &[f64], s_fake: &[f64]) {
        let correct = s_real.iter().filter(|s| **s > 0.0).count()
            + s_fake.iter().filter(|s| **s < 0.0).count();
        let total = s_real.len() + s_fake.len();
        if self.per_update.len() == self.capacity {
            self.per_update.pop_front();
        }
        self.per_update.push_back((correct, total));
    }

    /// Fraction of correctly signed frames across the window; None before
    /// the first update.
    pub fn accuracy(&self) -> Option<f64> {
        let (correct, total) = self
            .per_update
            .iter()
            .fold((0usize, 0usize), |(c, t), (uc, ut)| (c + uc, t + ut));
        if total == 0 {
            None
        } else {
            Some(correct as f64 / total as f64)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use crate::geometry::Rotation6D;

    #[test]
    fn l1_recon_spot_values() {
        let a = StateSeq::from_values(1, 2, vec![0.0, 1.0]).unwrap();
        let b = StateSeq::from_values(1, 2, vec![1.0, 1.0]).unwrap();
        assert_eq!(l1_recon(&a, &a).unwrap(), 0.0);
        assert_abs_diff_eq!(l1_recon(&a, &b).unwrap(), 0.5, epsilon = 1e-15);

        let offset = StateSeq::from_values(1, 2, vec![0.5, 1.5]).unwrap();
        assert_abs_diff_eq!(l1_recon(&a, &offset).unwrap(), 0.5, epsilon = 1e-15);

        let wide = StateSeq::zeros(1, 3).unwrap();
        assert!(l1_recon(&a, &wide).is_err());
    }

    fn identity_rotations(skel: &Skeleton, frames: usize) -> Vec<Vec<Matrix3<f64>>> {
        vec![vec![Matrix3::identity(); skel.joint_count()]; frames]
    }

    fn distal_targets(
        skel: &Skeleton,
        roots: &[Vector3<f64>],
        rots: &[Vec<Matrix3<f64>>],
    ) -> (Vec<[Vector3<f64>; 2]>, Vec<[Vector3<f64>; 2]>) {
        let mut hands = Vec::new();
        let mut feet = Vec::new();
        for (root, rr) in roots.iter().zip(rots) {
            let j = skel.forward_kinematics(root, rr).unwrap();
            hands.push([j[skel.left_hand()], j[skel.right_hand()]]);
            feet.push([j[skel.left_foot()], j[skel.right_foot()]]);
        }
        (hands, feet)
    }

    #[test]
    fn fk_loss_zero_on_ground_truth() {
        let skel = Skeleton::humanoid22();
        let roots = vec![Vector3::new(0.0, 0.0, 0.93); 3];
        let rots = identity_rotations(&skel, 3);
        let (hands, feet) = distal_targets(&skel, &roots, &rots);
        let v = fk_loss(&skel, &roots, &rots, &hands, &feet).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn fk_loss_accumulates_hand_offsets_over_frames() {
        let skel = Skeleton::humanoid22();
        let frames = 4;
        let roots = vec![Vector3::new(0.0, 0.0, 0.93); frames];
        let rots = identity_rotations(&skel, frames);
        let (mut hands, feet) = distal_targets(&skel, &roots, &rots);
        for h in hands.iter_mut() {
            h[0] += Vector3::new(0.1, 0.0, 0.0);
            h[1] += Vector3::new(0.1, 0.0, 0.0);
        }
        let v = fk_loss(&skel, &roots, &rots, &hands, &feet).unwrap();
        assert_abs_diff_eq!(v, 0.1 * 2.0 * frames as f64, epsilon = 1e-12);
    }

    #[test]
    fn fk_loss_ignores_rotations_off_the_distal_chains() {
        let skel = Skeleton::humanoid22();
        let roots = vec![Vector3::new(0.0, 0.0, 0.93)];
        let base = identity_rotations(&skel, 1);
        let (hands, feet) = distal_targets(&skel, &roots, &base);
        // The head joint is a leaf: rotating it moves no other joint.
        let head = 15;
        assert!(skel.parents().iter().all(|p| *p != head));
        let mut twisted = base.clone();
        twisted[0][head] =
            *nalgebra::Rotation3::from_euler_angles(0.5, 0.4, 0.3).matrix();
        let v = fk_loss(&skel, &roots, &twisted, &hands, &feet).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn hinge_loss_spot_values() {
        assert_eq!(hinge_d_loss(&[1.0, 1.0], &[-1.0, -1.0]).unwrap(), 0.0);
        assert_eq!(hinge_d_loss(&[0.0], &[0.0]).unwrap(), 2.0);
        assert_eq!(hinge_d_loss(&[2.0], &[-2.0]).unwrap(), 0.0);
        assert!(hinge_d_loss(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn hinge_loss_zero_iff_margins_met() {
        let v = hinge_d_loss(&[1.0, 0.99], &[-1.0, -1.0]).unwrap();
        assert!(v > 0.0);
        let v = hinge_d_loss(&[1.0, 5.0], &[-1.0, -1.2]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn gen_adv_loss_spot_values() {
        assert_eq!(gen_adv_loss(&[0.5, -0.5]).unwrap(), 0.0);
        assert_eq!(gen_adv_loss(&[1.0, 1.0, 1.0]).unwrap(), -1.0);
        // Linearity: decreasing all scores by delta raises the loss by delta.
        let base = gen_adv_loss(&[0.3, -0.7, 1.1]).unwrap();
        let moved = gen_adv_loss(&[0.3 - 0.25, -0.7 - 0.25, 1.1 - 0.25]).unwrap();
        assert_abs_diff_eq!(moved, base + 0.25, epsilon = 1e-12);
    }

    #[test]
    fn gen_adv_loss_is_odd() {
        let s = [0.4, -1.3, 2.2, 0.0];
        let neg: Vec<f64> = s.iter().map(|v| -v).collect();
        let sum = gen_adv_loss(&s).unwrap() + gen_adv_loss(&neg).unwrap();
        assert_abs_diff_eq!(sum, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn farthest_point_sample_is_deterministic_and_spread() {
        let cloud: Vec<Vector3<f64>> = (0..100)
            .map(|i| {
                let a = i as f64 * 0.61;
                Vector3::new(a.sin(), a.cos(), (a * 0.5).sin())
            })
            .collect();
        let a = farthest_point_sample(&cloud, 16, 4).unwrap();
        let b = farthest_point_sample(&cloud, 16, 4).unwrap();
        assert_eq!(a, b);
        // Greedy max-min selection never picks the same point twice.
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                assert!((a[i] - a[j]).norm() > 1e-12);
            }
        }
        assert!(farthest_point_sample(&cloud, 101, 4).is_err());
    }

    fn posed_motion(roots: Vec<Vector3<f64>>, obj_t: Vec<Vector3<f64>>) -> MotionSequence {
        let skel = Skeleton::humanoid22();
        let rot = Rotation6D([1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let frames = roots.len();
        MotionSequence::new(
            roots,
            vec![vec![rot; skel.joint_count()]; frames],
            obj_t,
            vec![Matrix3::identity(); frames],
        )
        .unwrap()
    }

    fn static_motion(frames: usize) -> MotionSequence {
        posed_motion(
            vec![Vector3::new(0.0, 0.0, 0.93); frames],
            vec![Vector3::zeros(); frames],
        )
    }

    #[test]
    fn discriminator_rows_have_the_declared_width() {
        let skel = Skeleton::humanoid22();
        let motion = static_motion(3);
        let points: Vec<Vector3<f64>> =
            (0..64).map(|i| Vector3::new(i as f64 * 0.01, 0.0, 0.0)).collect();
        let rows = discriminator_input(&motion, &points, &skel).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.len() == 204));
    }

    #[test]
    fn identity_object_pose_passes_points_through() {
        let skel = Skeleton::humanoid22();
        let motion = static_motion(2);
        let points = vec![Vector3::new(0.3, -0.2, 0.7), Vector3::new(-0.1, 0.0, 0.4)];
        let rows = discriminator_input(&motion, &points, &skel).unwrap();
        for row in &rows {
            let block = &row[12..];
            for (k, p) in points.iter().enumerate() {
                assert_eq!(&block[3 * k..3 * k + 3], p.as_slice());
            }
        }
    }

    #[test]
    fn object_translation_shifts_the_object_block() {
        let skel = Skeleton::humanoid22();
        let motion = posed_motion(
            vec![Vector3::new(0.0, 0.0, 0.93); 2],
            vec![Vector3::zeros(), Vector3::new(1.0, 0.0, 0.0)],
        );
        let points = vec![Vector3::new(0.3, -0.2, 0.7)];
        let rows = discriminator_input(&motion, &points, &skel).unwrap();
        assert_abs_diff_eq!(rows[1][12] - rows[0][12], 1.0, epsilon = 1e-15);
        assert_eq!(rows[1][13], rows[0][13]);
        assert_eq!(rows[1][14], rows[0][14]);
    }

    #[test]
    fn translating_root_and_object_together_shifts_every_coordinate() {
        let skel = Skeleton::humanoid22();
        let shift = Vector3::new(0.4, -0.7, 0.2);
        let base = static_motion(2);
        let moved = posed_motion(
            vec![Vector3::new(0.0, 0.0, 0.93) + shift; 2],
            vec![shift; 2],
        );
        let points = vec![Vector3::new(0.3, -0.2, 0.7), Vector3::new(0.0, 0.1, 0.0)];
        let a = discriminator_input(&base, &points, &skel).unwrap();
        let b = discriminator_input(&moved, &points, &skel).unwrap();
        for (ra, rb) in a.iter().zip(&b) {
            for (k, (va, vb)) in ra.iter().zip(rb).enumerate() {
                assert_abs_diff_eq!(vb - va, shift[k % 3], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn total_loss_spot_values() {
        let unit = LossParts { tg: 1.0, ag: 1.0, fk: 1.0, g: 1.0 };
        let ones = LossWeights { lambda_tg: 1.0, lambda_ag: 1.0, lambda_fk: 1.0, lambda_g: 1.0 };
        assert_eq!(total_loss(&unit, &ones).unwrap(), 4.0);

        let defaults = LossWeights::default();
        let total = total_loss(&unit, &defaults).unwrap();
        assert_eq!(total, 2.1 + 0.03);

        let zero = LossWeights { lambda_tg: 0.0, lambda_ag: 0.0, lambda_fk: 0.0, lambda_g: 0.0 };
        assert_eq!(total_loss(&unit, &zero).unwrap(), 0.0);
    }

    #[test]
    fn adapt_lambda_g_follows_the_rule() {
        assert_eq!(adapt_lambda_g(0.05, 0.95), 0.05);
        assert_eq!(adapt_lambda_g(0.03, 0.7), 0.03);
        assert_abs_diff_eq!(adapt_lambda_g(0.03, 0.5), 0.03 / 1.05, epsilon = 1e-15);
        assert_abs_diff_eq!(adapt_lambda_g(0.03, 0.9), 0.03 * 1.05, epsilon = 1e-15);
        assert_eq!(adapt_lambda_g(0.0101, 0.1), 0.01);
    }

    #[test]
    fn accuracy_window_counts_hinge_signs() {
        let mut w = AccuracyWindow::new(100);
        assert_eq!(w.accuracy(), None);
        w.record(&[1.0, -0.5], &[-1.0, 0.5]);
        // Correct: real 1.0 and fake -1.0; wrong: real -0.5 and fake 0.5.
        assert_eq!(w.accuracy(), Some(0.5));
        w.record(&[2.0, 2.0], &[-2.0, -2.0]);
        assert_eq!(w.accuracy(), Some(0.75));
    }

    #[test]
    fn accuracy_window_evicts_old_updates() {
        let mut w = AccuracyWindow::new(2);
        w.record(&[-1.0], &[1.0]); // all wrong
        w.record(&[1.0], &[-1.0]); // all right
        w.record(&[1.0], &[-1.0]); // all right, evicting the first
        assert_eq!(w.accuracy(), Some(1.0));
    }

    proptest! {
        #[test]
        fn hinge_loss_is_non_negative_and_permutation_invariant(
            scores in proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..20),
            swap in proptest::collection::vec(0usize..19, 0..8),
        ) {
            let real: Vec<f64> = scores.iter().map(|s| s.0).collect();
            let fake: Vec<f64> = scores.iter().map(|s| s.1).collect();
            let v = hinge_d_loss(&real, &fake).unwrap();
            prop_assert!(v >= 0.0);

            let mut real_p = real.clone();
            let mut fake_p = fake.clone();
            for (k, s) in swap.iter().enumerate() {
                let i = k % real.len();
                let j = s % real.len();
                real_p.swap(i, j);
                fake_p.swap(i, j);
            }
            let vp = hinge_d_loss(&real_p, &fake_p).unwrap();
            prop_assert!((v - vp).abs() < 1e-12);
        }

        #[test]
        fn adapt_lambda_g_stays_in_band(
            start in 0.01f64..0.05,
            accs in proptest::collection::vec(0.0f64..1.0, 1..200),
        ) {
            let mut lam = start;
            for a in accs {
                lam = adapt_lambda_g(lam, a);
                prop_assert!((LAMBDA_G_MIN..=LAMBDA_G_MAX).contains(&lam));
            }
        }
    }
}

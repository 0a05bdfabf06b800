//! Shared fixtures for the CLI integration tests: a posed humanoid motion
//! builder, seeded feature rows, and a helper for driving the built binary.

#![allow(dead_code)]

use std::path::Path;
use std::process::Command;

use hoiplan_cli::formats::MotionFrame;
use hoiplan_core::geometry::Skeleton;
use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const IDENTITY_6D: [f64; 6] = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];

pub const IDENTITY_ROW_MAJOR: [f64; 9] = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];

/// World position of the left hand for an identity pose rooted at `root`.
pub fn left_hand_at(skel: &Skeleton, root: Vector3<f64>) -> Vector3<f64> {
    let rots = vec![Matrix3::identity(); skel.joint_count()];
    let joints = skel.forward_kinematics(&root, &rots).unwrap();
    joints[skel.left_hand()]
}

/// Identity-pose clip: the root holds still for `hold` frames (giving the
/// floor estimator stance frames), then drifts 0.2 m per frame along +x. The
/// object sits exactly in the left hand for the first half of the clip and
/// one meter away for the rest, so contact labels flip mid-clip.
pub fn walking_frames(frames: usize, hold: usize) -> Vec<MotionFrame> {
    assert!(hold >= 2 && hold < frames);
    let skel = Skeleton::humanoid22();
    let mut out = Vec::with_capacity(frames);
    for t in 0..frames {
        let moved = t.saturating_sub(hold - 1) as f64;
        let root = Vector3::new(0.2 * moved, 0.0, 0.95);
        let hand = left_hand_at(&skel, root);
        let obj_t =
            if t < frames / 2 { hand } else { hand + Vector3::new(1.0, 0.0, 0.0) };
        out.push(MotionFrame {
            t,
            root: root.into(),
            joints6d: vec![IDENTITY_6D; skel.joint_count()],
            obj_t: obj_t.into(),
            obj_r: IDENTITY_ROW_MAJOR,
        });
    }
    out
}

/// Seeded feature rows with well-spread finite values.
pub fn feature_rows(seed: u64, n: usize, d: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..d).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect()
}

/// Runs the built binary with the given arguments and working inputs.
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_hoiplan"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().expect("exit code present"),
        String::from_utf8(output.stdout).expect("stdout is utf-8"),
        String::from_utf8(output.stderr).expect("stderr is utf-8"),
    )
}

/// Parses a metric report CSV (ignoring the leading `# seed` comment) into
/// (name, value, unit, note) tuples; `na` values map to `None`.
pub fn parse_report(text: &str) -> Vec<(String, Option<f64>, String, String)> {
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.starts_with("metric,") || line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.splitn(4, ',').collect();
        assert_eq!(parts.len(), 4, "malformed report row: {line}");
        let value =
            if parts[1] == "na" { None } else { Some(parts[1].parse::<f64>().unwrap()) };
        rows.push((parts[0].to_string(), value, parts[2].to_string(), parts[3].to_string()));
    }
    rows
}

pub fn report_value(rows: &[(String, Option<f64>, String, String)], name: &str) -> Option<f64> {
    rows.iter().find(|r| r.0 == name).unwrap_or_else(|| panic!("missing row {name}")).1
}

pub fn report_unit(rows: &[(String, Option<f64>, String, String)], name: &str) -> String {
    rows.iter().find(|r| r.0 == name).unwrap_or_else(|| panic!("missing row {name}")).2.clone()
}

/// Path to a data file shipped with the crate.
pub fn asset(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("assets").join(name).display().to_string()
}

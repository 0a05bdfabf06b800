//! File-format round trips and end-to-end command behavior: exit codes,
//! output headers, and the documented example invocations.

mod common;

use std::fs;

use common::{
    asset, feature_rows, parse_report, report_unit, report_value, run_cli, walking_frames,
};
use hoiplan_cli::formats::{
    frames_to_motion, motion_to_frames, read_features, read_motion_frames, read_sdf,
    read_skeleton, write_features, write_motion_frames, write_sdf,
};
use hoiplan_core::geometry::{SdfGrid, Skeleton};
use hoiplan_core::metrics::FeatureSet;
use nalgebra::Vector3;
use serde_json::Value;
use tempfile::tempdir;

#[test]
fn motion_round_trip_is_identity() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("clip.jsonl");
    let frames = walking_frames(8, 3);
    write_motion_frames(&path, &frames).unwrap();
    let reread = read_motion_frames(&path).unwrap();
    assert_eq!(frames, reread);

    // Parse -> serialize -> parse is also exact through the motion type.
    let motion = frames_to_motion(&reread).unwrap();
    let frames_again = motion_to_frames(&motion);
    assert_eq!(frames, frames_again);
    let path2 = dir.path().join("clip2.jsonl");
    write_motion_frames(&path2, &frames_again).unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
}

#[test]
fn malformed_motion_line_is_reported_with_its_number() {
    let dir = tempdir().unwrap();
    let good = serde_json::to_string(&walking_frames(3, 2)[0]).unwrap();
    let path = dir.path().join("bad.jsonl");
    fs::write(&path, format!("{good}\n{{\"t\": 1, \"root\": [0, 0]}}\n")).unwrap();
    let err = read_motion_frames(&path).unwrap_err();
    let msg = format!("{err:#}");
    assert!(msg.contains(":2"), "error does not name line 2: {msg}");
}

#[test]
fn sdf_file_round_trips() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("scene.sdf");
    // Values chosen to be exact in 32-bit floats.
    let values: Vec<f64> = (0..12).map(|i| i as f64 * 0.25 - 1.5).collect();
    let grid =
        SdfGrid::from_values([3, 2, 2], 0.5, Vector3::new(-1.0, 0.0, 0.5), values.clone())
            .unwrap();
    write_sdf(&path, &grid).unwrap();
    let reread = read_sdf(&path).unwrap();
    assert_eq!(reread.dims(), [3, 2, 2]);
    assert_eq!(reread.voxel_size(), 0.5);
    assert_eq!(reread.origin(), Vector3::new(-1.0, 0.0, 0.5));
    assert_eq!(reread.values(), values.as_slice());
}

#[test]
fn skeleton_asset_matches_builtin() {
    let skel = read_skeleton(asset("skeleton_22.json").as_ref()).unwrap();
    let builtin = Skeleton::humanoid22();
    assert_eq!(skel.parents(), builtin.parents());
    assert_eq!(skel.offsets(), builtin.offsets());
    assert_eq!(skel.left_hand(), builtin.left_hand());
    assert_eq!(skel.right_hand(), builtin.right_hand());
    assert_eq!(skel.left_foot(), builtin.left_foot());
    assert_eq!(skel.right_foot(), builtin.right_foot());
}

#[test]
fn feature_file_round_trips() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("f.txt");
    let rows = feature_rows(4, 5, 3);
    write_features(&path, &rows).unwrap();
    let set = read_features(&path).unwrap();
    assert_eq!(set, FeatureSet::from_rows(rows).unwrap());
}

fn write_scene(dir: &std::path::Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

const OPEN_SCENE: &str = r#"{"bounds": [0, 0, 6, 6], "resolution": 1.0}"#;

#[test]
fn plan_crosses_an_empty_scene_diagonally() {
    let dir = tempdir().unwrap();
    let scene = write_scene(dir.path(), "open.json", OPEN_SCENE);
    let (code, stdout, _) =
        run_cli(&["--seed", "11", "plan", &scene, "--start", "0,0", "--goal", "5,5"]);
    assert_eq!(code, 0);
    let out: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(out["seed"], 11);
    let cells = out["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 6);
    for (i, cell) in cells.iter().enumerate() {
        assert_eq!(cell[0], i as u64);
        assert_eq!(cell[1], i as u64);
    }
    assert_eq!(out["world"][0][0], 0.5);
    assert_eq!(out["world"][0][1], 0.5);
    assert_eq!(out["cost"]["risk_term"], 0.0);
    let total = out["cost"]["total"].as_f64().unwrap();
    assert!((total - 5.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
}

#[test]
fn plan_reports_no_path_with_exit_2() {
    let dir = tempdir().unwrap();
    // Goal cell under a footprint.
    let blocked_goal = write_scene(
        dir.path(),
        "blocked.json",
        r#"{"bounds": [0, 0, 6, 6], "resolution": 1.0,
            "footprints": [{"type": "rect", "min": [5, 5], "max": [6, 6]}]}"#,
    );
    let (code, _, stderr) =
        run_cli(&["plan", &blocked_goal, "--start", "0,0", "--goal", "5,5"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("no path"), "stderr: {stderr}");

    // Goal walkable but disconnected behind a full wall.
    let walled = write_scene(
        dir.path(),
        "walled.json",
        r#"{"bounds": [0, 0, 6, 6], "resolution": 1.0,
            "footprints": [{"type": "rect", "min": [0, 3], "max": [6, 4]}]}"#,
    );
    let (code, _, stderr) = run_cli(&["plan", &walled, "--start", "0,0", "--goal", "5,5"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("no path"), "stderr: {stderr}");
}

#[test]
fn plan_lambda_r_flag_reaches_the_cost_summary() {
    let dir = tempdir().unwrap();
    let scene = write_scene(dir.path(), "open.json", OPEN_SCENE);
    let risk_path = dir.path().join("risk.txt");
    fs::write(&risk_path, "0.25 0.25 0.25 0.25 0.25 0.25\n".repeat(6)).unwrap();
    let (code, stdout, _) = run_cli(&[
        "plan",
        &scene,
        "--start",
        "0,0",
        "--goal",
        "5,5",
        "--risk",
        risk_path.to_str().unwrap(),
        "--lambda-r",
        "4.0",
    ]);
    assert_eq!(code, 0);
    let out: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(out["cost"]["lambda_r"], 4.0);
    let step = out["cost"]["step_length"].as_f64().unwrap();
    let risk = out["cost"]["risk_term"].as_f64().unwrap();
    let total = out["cost"]["total"].as_f64().unwrap();
    assert!(risk > 0.0);
    assert!((total - (step + 4.0 * risk)).abs() < 1e-9);
}

#[test]
fn plan_config_file_supplies_lambda_r() {
    let dir = tempdir().unwrap();
    let scene = write_scene(dir.path(), "open.json", OPEN_SCENE);
    let risk_path = dir.path().join("risk.txt");
    fs::write(&risk_path, "0.5 0.5 0.5 0.5 0.5 0.5\n".repeat(6)).unwrap();
    let config = write_scene(dir.path(), "config.json", r#"{"plan": {"lambda_r": 4.0}}"#);
    let (code, stdout, _) = run_cli(&[
        "--config",
        &config,
        "plan",
        &scene,
        "--start",
        "0,0",
        "--goal",
        "5,5",
        "--risk",
        risk_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let out: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(out["cost"]["lambda_r"], 4.0);
}

#[test]
fn config_with_unknown_keys_is_rejected() {
    let dir = tempdir().unwrap();
    let scene = write_scene(dir.path(), "open.json", OPEN_SCENE);
    let config =
        write_scene(dir.path(), "config.json", r#"{"plan": {"lambda_r": 1.0}, "typo": {}}"#);
    let (code, _, stderr) = run_cli(&[
        "--config",
        &config,
        "plan",
        &scene,
        "--start",
        "0,0",
        "--goal",
        "5,5",
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains("typo"), "stderr: {stderr}");
}

#[test]
fn simulate_without_an_obstacle_never_replans() {
    let dir = tempdir().unwrap();
    let scenario = write_scene(
        dir.path(),
        "calm.json",
        r#"{"scene": {"bounds": [0, 0, 6, 6], "resolution": 1.0},
            "start": [0, 0], "goal": [5, 5]}"#,
    );
    let (code, stdout, _) = run_cli(&["simulate", &scenario]);
    assert_eq!(code, 0);
    let summary = timeline_summary(&stdout);
    assert_eq!(summary["replan_count"], 0);
    assert_eq!(summary["wait_steps"], 0);
    assert_eq!(summary["goal_reached"], true);
}

fn timeline_summary(stdout: &str) -> Value {
    let line = stdout.lines().rev().find(|l| !l.is_empty()).unwrap();
    let record: Value = serde_json::from_str(line).unwrap();
    record["summary"].clone()
}

#[test]
fn simulate_corridor_adopts_a_two_tick_wait() {
    let (code, stdout, _) = run_cli(&["simulate", &asset("corridor.json")]);
    assert_eq!(code, 0);
    let replans: Vec<Value> = stdout
        .lines()
        .filter(|l| l.contains("\"replanned\""))
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(replans.len(), 1);
    assert_eq!(replans[0]["wait_steps"], 2);
    let summary = timeline_summary(&stdout);
    assert_eq!(summary["replan_count"], 1);
    assert_eq!(summary["wait_steps"], 2);
    assert_eq!(summary["goal_reached"], true);
}

#[test]
fn simulate_repeats_byte_for_byte_under_a_fixed_seed() {
    let dir = tempdir().unwrap();
    let out_a = dir.path().join("a.jsonl");
    let out_b = dir.path().join("b.jsonl");
    let corridor = asset("corridor.json");
    for out in [&out_a, &out_b] {
        let (code, _, _) =
            run_cli(&["--seed", "9", "--out", out.to_str().unwrap(), "simulate", &corridor]);
        assert_eq!(code, 0);
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
    let text = fs::read_to_string(&out_a).unwrap();
    assert_eq!(text.lines().next().unwrap(), r#"{"seed":9}"#);
}

#[test]
fn eval_reports_na_rows_when_optional_inputs_are_missing() {
    let dir = tempdir().unwrap();
    let clip = dir.path().join("clip.jsonl");
    write_motion_frames(&clip, &walking_frames(8, 3)).unwrap();
    let points = dir.path().join("points.txt");
    fs::write(&points, "0 0 0\n").unwrap();
    let clip_str = clip.to_str().unwrap();
    let (code, stdout, _) = run_cli(&[
        "--seed",
        "5",
        "eval",
        "--pred",
        clip_str,
        "--gt",
        clip_str,
        "--object-points",
        points.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("# seed 5\n"));
    assert_eq!(stdout.lines().nth(1).unwrap(), "metric,value,unit,note");
    let rows = parse_report(&stdout);
    for name in ["fid", "diversity", "r_precision"] {
        let row = rows.iter().find(|r| r.0 == name).unwrap();
        assert!(row.1.is_none(), "{name} should be na");
        assert_eq!(row.3, "no feature files");
    }
    let pen = rows.iter().find(|r| r.0 == "penetration").unwrap();
    assert!(pen.1.is_none());
    assert_eq!(pen.3, "no sdf file");

    // Identical pred and gt: every ground-truth difference is zero and the
    // contact classifier is perfect.
    for name in ["t_s", "t_e", "mpjpe", "t_root", "t_obj", "o_obj"] {
        assert_eq!(report_value(&rows, name), Some(0.0), "{name}");
    }
    assert_eq!(report_value(&rows, "c_f1"), Some(1.0));
    for name in ["t_s", "t_e", "h_feet", "foot_sliding", "mpjpe", "t_root", "t_obj"] {
        assert_eq!(report_unit(&rows, name), "cm", "{name}");
    }
    assert_eq!(report_unit(&rows, "o_obj"), "frobenius");
}

#[test]
fn landscape_constant_loss_fills_every_cell() {
    let (code, stdout, _) =
        run_cli(&["--seed", "2", "landscape", "constant:3", "--steps", "5", "--dims", "4"]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("# seed 2\n"));
    assert_eq!(stdout.lines().nth(1).unwrap(), "alpha,beta,loss");
    let cells: Vec<&str> = stdout.lines().skip(2).collect();
    assert_eq!(cells.len(), 25);
    for line in cells {
        assert!(line.ends_with(",3"), "cell not 3: {line}");
    }
}

#[test]
fn landscape_quadratic_is_zero_at_the_center() {
    let (code, stdout, _) =
        run_cli(&["--seed", "2", "landscape", "quadratic", "--steps", "5", "--dims", "4"]);
    assert_eq!(code, 0);
    let center: Vec<&str> = stdout
        .lines()
        .skip(2)
        .filter(|l| {
            let mut it = l.split(',');
            it.next() == Some("0") && it.next() == Some("0")
        })
        .collect();
    assert_eq!(center.len(), 1, "expected one (0, 0) cell");
    assert_eq!(center[0], "0,0,0");
}

#[test]
fn landscape_repeats_with_the_same_seed() {
    let args = ["--seed", "3", "landscape", "rosenbrock", "--steps", "7", "--dims", "6"];
    let (code_a, out_a, _) = run_cli(&args);
    let (code_b, out_b, _) = run_cli(&args);
    assert_eq!(code_a, 0);
    assert_eq!(code_b, 0);
    assert_eq!(out_a, out_b);
}

#[test]
fn landscape_rejects_unknown_losses_listing_the_options() {
    let (code, _, stderr) = run_cli(&["landscape", "cubic"]);
    assert_eq!(code, 1);
    for option in ["quadratic", "rosenbrock", "constant"] {
        assert!(stderr.contains(option), "stderr misses {option}: {stderr}");
    }
}

#[test]
fn usage_errors_and_help_use_the_documented_exit_codes() {
    let (code, stdout, _) = run_cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("plan"));
    let (code, _, _) = run_cli(&["--no-such-flag"]);
    assert_eq!(code, 1);
    let dir = tempdir().unwrap();
    let scene = write_scene(dir.path(), "open.json", OPEN_SCENE);
    let (code, _, stderr) =
        run_cli(&["plan", &scene, "--start", "1,2,3", "--goal", "5,5"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("expected x,y"), "stderr: {stderr}");
}

#[test]
fn eval_rejects_malformed_motion_files_naming_the_line() {
    let dir = tempdir().unwrap();
    let good = dir.path().join("good.jsonl");
    write_motion_frames(&good, &walking_frames(4, 2)).unwrap();
    let bad = dir.path().join("bad.jsonl");
    let first = serde_json::to_string(&walking_frames(4, 2)[0]).unwrap();
    fs::write(&bad, format!("{first}\nnot json\n")).unwrap();
    let (code, _, stderr) = run_cli(&[
        "eval",
        "--pred",
        bad.to_str().unwrap(),
        "--gt",
        good.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(stderr.contains(":2"), "stderr does not name line 2: {stderr}");
}

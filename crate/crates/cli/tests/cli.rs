use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

use kinebench::ingest::write_pose_csv;
use kinebench::skeleton::{JointSet, PoseSequence, BODYTRACK34_JOINTS, CANONICAL_JOINTS};
use kinebench::testkit::{benchmark_bundle, emit_fixture, synth_pose, Motion, SynthSpec};

fn kinebench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinebench"))
        .args(args)
        .env_remove("KINEBENCH_PALETTE")
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// File name → contents for every file in `dir`, optionally skipping one.
fn snapshot(dir: &Path, skip: &str) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|f| f.file_name().unwrap() != skip)
        .map(|f| (f.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&f).unwrap()))
        .collect()
}

fn pose_with(names: &[&str], frames: usize) -> PoseSequence {
    let set = JointSet::new(names.iter().copied()).unwrap();
    let rows = (0..frames)
        .map(|f| {
            (0..names.len())
                .map(|j| [j as f64 * 0.1, f as f64 + 1.0, -(j as f64)])
                .collect()
        })
        .collect();
    PoseSequence::from_frames(set, rows, 30.0).unwrap()
}

#[test]
fn convert_bodytrack_to_canonical() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bt.csv");
    let output = dir.path().join("out.csv");
    write_pose_csv(&pose_with(&BODYTRACK34_JOINTS, 3), &input).unwrap();
    let out = kinebench(&["convert", "--kind", "bodytrack34", p(&input), p(&output)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&output).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 1 + 17 * 3);
    for j in CANONICAL_JOINTS {
        assert!(header.contains(&format!(",{j}_x,")));
    }
}

#[test]
fn convert_canonical_is_data_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.csv");
    let output = dir.path().join("out.csv");
    write_pose_csv(&pose_with(&CANONICAL_JOINTS, 4), &input).unwrap();
    let out = kinebench(&["convert", "--kind", "h36m17_generic", p(&input), p(&output)]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(std::fs::read(&input).unwrap(), std::fs::read(&output).unwrap());
}

#[test]
fn convert_unknown_kind_fails_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("c.csv");
    write_pose_csv(&pose_with(&CANONICAL_JOINTS, 1), &input).unwrap();
    let out = kinebench(&["convert", "--kind", "openpose25", p(&input), p(&dir.path().join("o.csv"))]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("openpose25"));
}

#[test]
fn angles_of_a_right_angle_skeleton() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pose.csv");
    let output = dir.path().join("angles.csv");
    let (pose, _) = synth_pose(&SynthSpec {
        motion: Motion::ConstantPose,
        duration_s: 1.0,
        ..SynthSpec::default()
    })
    .unwrap();
    write_pose_csv(&pose, &input).unwrap();
    let out = kinebench(&["angles", p(&input), "A01", p(&output)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&output).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time_s,angle_deg"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (t, a) = l.split_once(',').unwrap();
            (t.parse().unwrap(), a.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 30);
    assert_eq!(rows[3].0, 0.1);
    assert!(rows.iter().all(|(_, a)| (a - 90.0).abs() < 1e-9));

    let bad = kinebench(&["angles", p(&input), "A99", p(&output)]);
    assert!(!bad.status.success());
    assert!(stderr(&bad).contains("A99"));
}

#[test]
fn run_is_deterministic_across_job_counts() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = emit_fixture(&benchmark_bundle(), dir.path()).unwrap();
    let one = dir.path().join("one");
    let four = dir.path().join("four");
    let a = kinebench(&["run", p(&manifest), "--output-dir", p(&one)]);
    let b = kinebench(&["--jobs", "4", "run", p(&manifest), "--output-dir", p(&four)]);
    assert!(a.status.success(), "{}", stderr(&a));
    assert!(b.status.success(), "{}", stderr(&b));
    let (sa, sb) = (snapshot(&one, "run_log.json"), snapshot(&four, "run_log.json"));
    assert!(sa.contains_key("overlay_S01_A01.svg"));
    assert!(sa.contains_key("summary_overall_per_model.md"));
    assert_eq!(sa, sb);
}

#[test]
fn run_survives_one_unreadable_file() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = emit_fixture(&benchmark_bundle(), dir.path()).unwrap();
    std::fs::write(dir.path().join("S01_A01_lagged_pose.csv"), "not,a,pose\n\u{0}\u{1}").unwrap();
    let out_dir = dir.path().join("out");
    let out = kinebench(&["run", p(&manifest), "--output-dir", p(&out_dir)]);
    assert!(out.status.success(), "{}", stderr(&out));

    let records = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    assert_eq!(records.lines().count(), 1 + 3);
    let log: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("run_log.json")).unwrap()).unwrap();
    let trials = log["trials"].as_array().unwrap();
    assert_eq!(trials.len(), 4);
    assert_eq!(log["n_ok"], 3);
    assert_eq!(log["n_failed"], 1);
    assert_eq!(trials[2]["status"], "failed");
    assert_eq!(trials[2]["model"], "lagged");
    assert_eq!(log["config"]["alignment_config"]["max_offset"], 15);
}

#[test]
fn run_fails_when_nothing_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"trials": []}"#).unwrap();
    let out = kinebench(&["run", p(&empty)]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("no trials"));

    let manifest = emit_fixture(&benchmark_bundle(), dir.path()).unwrap();
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "mot") {
            std::fs::write(&path, "garbage").unwrap();
        }
    }
    let out = kinebench(&["run", p(&manifest)]);
    assert!(!out.status.success());
    let log = std::fs::read_to_string(dir.path().join("results/run_log.json")).unwrap();
    assert!(log.contains("\"n_failed\": 4"));
}

#[test]
fn report_reproduces_run_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = emit_fixture(&benchmark_bundle(), dir.path()).unwrap();
    let run_dir = dir.path().join("run");
    let report_dir = dir.path().join("report");
    assert!(kinebench(&["run", p(&manifest), "--output-dir", p(&run_dir)]).status.success());
    let out = kinebench(&[
        "report",
        p(&run_dir.join("results.csv")),
        "--output-dir",
        p(&report_dir),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let regenerated = snapshot(&report_dir, "");
    let original = snapshot(&run_dir, "");
    assert!(regenerated.len() >= 8);
    for (name, bytes) in &regenerated {
        assert_eq!(Some(bytes), original.get(name), "{name} differs");
    }
}

#[test]
fn report_on_hand_written_records() {
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("records.csv");
    std::fs::write(
        &records,
        "subject_id,activity_id,model,rmse,nrmse,mae,pearson,r2,n_samples,offset,fit_rmse\n\
         S01,A01,M,8,0.1,6,0.9,0.5,100,0,1.0\n\
         S02,A01,M,12,0.3,6,,0.7,100,2,1.5\n",
    )
    .unwrap();
    let out = kinebench(&["report", p(&records)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let md = std::fs::read_to_string(dir.path().join("summary_overall_per_model.md")).unwrap();
    assert_eq!(
        md.lines().nth(2).unwrap(),
        "| M | 10.00 ± 2.00 | 6.00 ± 0.00 | 0.20 ± 0.10 | 0.90 ± 0.00 | 0.60 ± 0.10 |"
    );
    let out = kinebench(&["report", p(&records), "--std", "sample", "--overall", "activity-means"]);
    assert!(out.status.success());
    let md = std::fs::read_to_string(dir.path().join("summary_overall_of_activity_means.md")).unwrap();
    // one activity: the single activity mean has zero spread
    assert!(md.contains("| M | 10.00 ± 0.00 |"));
    let per = std::fs::read_to_string(dir.path().join("summary_per_activity_per_model.md")).unwrap();
    assert!(per.contains("| ID | Legend | M |"));
    assert!(per.contains("| A01 | walk_forward | 10.00 ± 2.83 |"));

    std::fs::write(&records, "subject,activity\nS01,A01\n").unwrap();
    assert!(!kinebench(&["report", p(&records)]).status.success());
}

#[test]
fn synth_flags_shape_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = kinebench(&[
        "synth",
        p(dir.path()),
        "--motion",
        "sinusoid-elbow",
        "--activity",
        "A06",
        "--lag",
        "-4",
        "--duration",
        "12",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let run = kinebench(&["run", p(&dir.path().join("manifest.json"))]);
    assert!(run.status.success(), "{}", stderr(&run));
    let records = std::fs::read_to_string(dir.path().join("results/results.csv")).unwrap();
    let row = records.lines().nth(1).unwrap();
    assert!(row.starts_with("S01,A06,synthetic,"));
    assert!(row.split(',').nth(9) == Some("-4"), "{row}");

    let bad = kinebench(&["synth", p(dir.path()), "--lag", "20"]);
    assert!(!bad.status.success());
}

#[test]
fn palette_file_overrides_colours() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = emit_fixture(&benchmark_bundle(), dir.path()).unwrap();
    let palette = dir.path().join("palette.txt");
    std::fs::write(&palette, "#123456\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_kinebench"))
        .args(["run", p(&manifest)])
        .env("KINEBENCH_PALETTE", &palette)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let svg = std::fs::read_to_string(dir.path().join("results/A01_rmse.svg")).unwrap();
    assert_eq!(svg.matches("fill=\"#123456\"").count(), 4);
}

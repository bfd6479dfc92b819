use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eas_core::imagecore::{load_image, save_image, ImageF, SaveMode};
use eas_core::synth;

fn eas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eas"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_image(dir: &Path, name: &str, img: &ImageF) -> PathBuf {
    let path = dir.join(name);
    save_image(img, &path, SaveMode::Pgm16).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn detect_on_constant_image_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let img = write_image(dir.path(), "flat.pgm", &ImageF::filled(40, 30, 0.5));
    let out = dir.path().join("kps.csv");
    let o = eas(&["detect", "--in", img.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(out).unwrap(), "x,y,r,score,octave\n");
}

#[test]
fn detect_writes_json_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let img = write_image(dir.path(), "scene.pgm", &synth::natural_scene(96, 80, 3));
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = eas(&[
            "detect", "--in", img.to_str().unwrap(), "--detector", "min-eigen", "--top-n", "20", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(out).unwrap()
    };
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 20);
}

#[test]
fn eval_without_pipeline_is_fully_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let img = write_image(dir.path(), "scene.pgm", &synth::natural_scene(128, 128, 1));
    let o = eas(&["eval", "--in", img.to_str().unwrap(), "--top-n", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "eas");
    assert_eq!(fields[1], "none");
    assert_eq!(fields[4].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn eval_accepts_pipeline_and_warp() {
    let dir = tempfile::tempdir().unwrap();
    let img = write_image(dir.path(), "scene.pgm", &synth::natural_scene(128, 128, 1));
    let pipe = dir.path().join("blur.txt");
    std::fs::write(&pipe, "gaussian sigma=1\n").unwrap();
    let o = eas(&[
        "eval", "--in", img.to_str().unwrap(), "--pipeline", pipe.to_str().unwrap(), "--warp", "1,0,0,0.5,1,0",
        "--detector", "harris", "--top-n", "40",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("harris,gaussian sigma=1 then warp [1 0 0; 0.5 1 0],40,"), "{text}");
}

#[test]
fn blur_writes_image() {
    let dir = tempfile::tempdir().unwrap();
    let img = write_image(dir.path(), "scene.pgm", &synth::natural_scene(64, 48, 2));
    let pipe = dir.path().join("p.txt");
    std::fs::write(&pipe, "motion l=5 theta=0.7\nsaltpepper frac=0.1\n").unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = eas(&[
            "blur", "--in", img.to_str().unwrap(), "--pipeline", pipe.to_str().unwrap(), "--out",
            out.to_str().unwrap(), "--seed", "9",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = run("a.f32");
    assert_eq!(load_image(&a).unwrap().dims(), (64, 48));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(run("b.f32")).unwrap());
}

#[test]
fn sweep_writes_report_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let img = write_image(dir.path(), "scene.pgm", &synth::natural_scene(96, 96, 4));
    let out = dir.path().join("report.csv");
    let o = eas(&[
        "sweep", "--in", img.to_str().unwrap(), "--axis", "motion:5,9", "--top-ns", "10,20", "--detectors",
        "eas,harris", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(&out).unwrap();
    assert_eq!(report.lines().count(), 1 + 2 * 2 * 2);
    assert!(dir.path().join("report.eas.csv").exists());
    assert!(dir.path().join("report.harris.csv").exists());
}

#[test]
fn bench_and_dump_scores() {
    let dir = tempfile::tempdir().unwrap();
    let img = write_image(dir.path(), "scene.pgm", &synth::natural_scene(64, 64, 5));
    let o = eas(&["bench", "--in", img.to_str().unwrap(), "--repeats", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("median"));

    let out = dir.path().join("scores.f32");
    let o = eas(&["dump-scores", "--in", img.to_str().unwrap(), "--octave", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(load_image(&out).unwrap().dims(), (32, 32));

    let o = eas(&["dump-scores", "--in", img.to_str().unwrap(), "--octave", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    let o = eas(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());

    assert_eq!(eas(&["--help"]).status.code(), Some(0));
    assert_eq!(eas(&["detect", "--in", "x.pgm", "--top-n", "zero"]).status.code(), Some(1));
    assert_eq!(eas(&["detect", "--in", "/nonexistent/img.pgm"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.pgm");
    std::fs::write(&junk, b"not an image").unwrap();
    assert_eq!(eas(&["detect", "--in", junk.to_str().unwrap()]).status.code(), Some(2));

    let img = write_image(dir.path(), "scene.pgm", &synth::natural_scene(32, 32, 1));
    let bad_pipe = dir.path().join("bad.txt");
    std::fs::write(&bad_pipe, "gaussian sigma=1\nwobble\n").unwrap();
    let o = eas(&["eval", "--in", img.to_str().unwrap(), "--pipeline", bad_pipe.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = eas(&["detect", "--in", img.to_str().unwrap(), "--detector", "sift"]);
    assert_eq!(o.status.code(), Some(1));
    let o = eas(&["eval", "--in", img.to_str().unwrap(), "--warp", "1,2,3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_lists_defaults() {
    let text = stdout(&eas(&["sweep", "--help"]));
    for needle in ["gaussian:1,3,5,7,9", "100,200,300,400,500", "eas,harris,min-eigen", "--edge-thr", "[default: 5]"] {
        assert!(text.contains(needle), "missing {needle}");
    }
}

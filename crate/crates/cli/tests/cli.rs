use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amoebalab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn passing_run_exits_zero() {
    let out = run(&["multivolume", "--n", "1", "--degrees", "1", "--trials", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["fiber_count"]["mean"], 1.0);
}

#[test]
fn failing_check_exits_two() {
    // a single trial with four real roots against a target of two
    let out = run(&["shub-smale", "--k", "1", "--degrees", "4", "--trials", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["verdict"], "fail");
}

#[test]
fn errors_exit_one() {
    assert_eq!(run(&["multivolume", "--trials", "0"]).status.code(), Some(1));
    assert_eq!(run(&["shub-smale", "--k", "2", "--degrees", "3"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(
        run(&["mixed-volume", "--support-file", "/nonexistent/support.json"]).status.code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |sub: &str| {
        let out = dir.path().join(sub);
        vec![
            "multivolume".to_owned(),
            "--degrees".into(),
            "2".into(),
            "--trials".into(),
            "60".into(),
            "--seed".into(),
            "11".into(),
            "--out".into(),
            out.display().to_string(),
        ]
    };
    let a: Vec<String> = args("a");
    let b: Vec<String> = args("b");
    let ra = run(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let rb = run(&b.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(ra.stdout, rb.stdout);
    for name in ["summary.json", "trials.jsonl"] {
        let x = fs::read(dir.path().join("a").join(name)).unwrap();
        let y = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let lines = fs::read_to_string(dir.path().join("a/trials.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 60);
}

#[test]
fn command_line_flags_beat_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# defaults\ntrials = 40\nseed = 5\ndegrees = 1\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "multivolume",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "8",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let manifest = read_json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["master_seed"], 8);
    assert_eq!(manifest["config"]["trials"], 40);
    assert_eq!(manifest["config"]["degrees"][0], 1);
}

#[test]
fn mixed_volume_of_the_cubic_simplex() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("simplex.json");
    fs::write(&path, r#"{"points": [[0, 0], [3, 0], [0, 3]]}"#).unwrap();
    let out = run(&["mixed-volume", "--support-file", path.to_str().unwrap(), "--doubled"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["alpha"], 9);
    let out = run(&["mixed-volume", "--support-file", path.to_str().unwrap()]);
    assert_eq!(stdout_json(&out)["mixed_volume"], 9);
}

#[test]
fn raster_writes_image_sidecar_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("line.txt");
    // z1 + z2 - 1
    fs::write(&poly, "# nvars 2 field real\n1 0 : 1 0\n1 0 : 0 1\n-1 0 : 0 0\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "raster",
        "--poly-file",
        poly.to_str().unwrap(),
        "--resolution",
        "100",
        "--samples",
        "200",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let pgm = fs::read(out_dir.join("amoeba.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n100 100\n255\n"));
    let sidecar = read_json(&out_dir.join("amoeba.json"));
    assert_eq!(sidecar["R"], 6.0);
    assert_eq!(sidecar["resolution"], 100);
    assert_eq!(sidecar["samples"], 200);
    assert!(sidecar["area_estimate"].as_f64().unwrap() > 4.0);

    let manifest = read_json(&out_dir.join("manifest.json"));
    assert_eq!(manifest["subcommand"], "raster");
    let outputs: Vec<&str> = manifest["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    for name in ["amoeba.pgm", "amoeba.json", "summary.json", "manifest.json"] {
        assert!(outputs.iter().any(|o| o.ends_with(name)), "{name} missing from {outputs:?}");
    }
}

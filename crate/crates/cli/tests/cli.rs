use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use orbihear_core::polytope::equal_up_to_translation;
use orbihear_core::LabeledPolytope;

const TRIANGLE: &str = r#"{"dim":2,"facets":[
  {"normal":[-1,0],"offset":"0","label":1},
  {"normal":[0,-1],"offset":"0","label":1},
  {"normal":[1,2],"offset":"2","label":2}]}"#;

fn orbihear(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbihear")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_reports_pass_and_fail() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "triangle.json", TRIANGLE);
    let o = orbihear(&["validate", &good]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rational simple: pass"));

    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"dim":2,"facets":[{"normal":[-1,0],"offset":"0","label":1},{"normal":[0,-1],"offset":"0","label":1},{"normal":[2,2],"offset":"2","label":1}]}"#,
    );
    let o = orbihear(&["validate", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error["));
}

#[test]
fn missing_file_is_exit_one() {
    let o = orbihear(&["validate", "/nonexistent/p.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[IO]"));
}

#[test]
fn usage_errors_are_exit_one() {
    let o = orbihear(&["football"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[USAGE]"));
    assert_eq!(orbihear(&["--help"]).status.code(), Some(0));
}

#[test]
fn faces_and_isotropy() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t.json", TRIANGLE);
    let o = orbihear(&["faces", &p, "--codim", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 4);
    assert!(out.lines().any(|l| l.starts_with("2,1,") && l.ends_with(&format!("{}", 5f64.sqrt()))));

    let o = orbihear(&["isotropy", &p]);
    let out = stdout(&o);
    assert!(out.contains("face 2: Z2"));
    assert!(out.contains("face 0-2: Z4"));
    assert!(out.contains("face 0-1: trivial"));
}

#[test]
fn forward_then_invert_recovers_the_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "t.json", TRIANGLE);
    let samples = dir.path().join("s.json");
    let csv_path = dir.path().join("curves.csv");
    let o = orbihear(&[
        "forward",
        &p,
        "--direction",
        "1,0",
        "--direction",
        "0,1",
        "--direction",
        "1,2",
        "--direction",
        "1,1",
        "--samples",
        samples.to_str().unwrap(),
        "-o",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv_text = fs::read_to_string(&csv_path).unwrap();
    assert!(csv_text.starts_with("direction,r,t_exponent,coefficient,source"));
    assert!(csv_text.lines().skip(1).all(|l| l.split(',').count() == 5));

    let prefix = dir.path().join("rec");
    let o = orbihear(&["invert", samples.to_str().unwrap(), "-o", prefix.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let truth = LabeledPolytope::from_json(TRIANGLE).unwrap();
    let plus = LabeledPolytope::from_json(&fs::read_to_string(dir.path().join("rec_plus.json")).unwrap()).unwrap();
    let minus = LabeledPolytope::from_json(&fs::read_to_string(dir.path().join("rec_minus.json")).unwrap()).unwrap();
    let neg = orbihear_core::polytope::negate(&truth);
    assert!(
        (equal_up_to_translation(&plus, &truth, 1e-9) && equal_up_to_translation(&minus, &neg, 1e-9))
            || (equal_up_to_translation(&plus, &neg, 1e-9) && equal_up_to_translation(&minus, &truth, 1e-9))
    );
}

#[test]
fn invert_rejects_bad_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", "{}");
    let o = orbihear(&["invert", &s, "--tol=-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[PARSE]"));
}

#[test]
fn minkowski_output_and_nonconvergence() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"normals":[[1,0],[0,1],[-1,-1]],"volumes":[1,1,1.4142135623730951]}"#);
    let out = dir.path().join("sol.json");
    let o = orbihear(&["minkowski", &m, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 3);

    // A 3 x 2 x 1 box: the solver starts from a cube and needs several steps.
    let m3 = write(
        dir.path(),
        "m3.json",
        r#"{"normals":[[1,0,0],[-1,0,0],[0,1,0],[0,-1,0],[0,0,1],[0,0,-1]],"volumes":[2,2,3,3,6,6]}"#,
    );
    let o = orbihear(&["minkowski", &m3, "--max-iter", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("error[NON_CONVERGENCE]"));
    let o = orbihear(&["minkowski", &m3]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let offsets: Vec<f64> = v["offsets"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (h, want) in offsets.iter().zip([1.5, 1.5, 1.0, 1.0, 0.5, 0.5]) {
        assert!((h - want).abs() < 1e-9, "{offsets:?}");
    }

    let unbalanced = write(dir.path(), "u.json", r#"{"normals":[[1,0],[0,1],[-1,-1]],"volumes":[1,1,1]}"#);
    let o = orbihear(&["minkowski", &unbalanced]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[BALANCE_VIOLATION]"));
}

#[test]
fn football_summary_constant() {
    let o = orbihear(&["football", "--p", "2", "--alpha", "0", "--tmin", "1e-4"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("t,exact_trace,prediction"));
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 13);
    let summary = out.lines().find(|l| l.starts_with('#')).unwrap();
    let fields: Vec<&str> = summary.split_whitespace().collect();
    let c0: f64 = fields[fields.iter().position(|f| *f == "c0").unwrap() + 1].parse().unwrap();
    assert!((c0 - 5.0 / 12.0).abs() < 1e-6, "{c0}");
}

#[test]
fn football_rejects_inverted_window() {
    let o = orbihear(&["football", "--p", "2", "--tmin", "1e-2", "--tmax", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn csc_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let yes = write(dir.path(), "y.json", r#"{"n":2,"int_c1sq":0,"int_c2":0,"vol":1,"c1_omega":0,"int_s_sq":0}"#);
    let o = orbihear(&["csc", &yes]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("csc: true"));
    assert!(stdout(&o).contains("\"int_R_sq\""));

    let no = write(dir.path(), "n.json", r#"{"n":2,"int_c1sq":0,"int_c2":0,"vol":1,"c1_omega":0,"int_s_sq":1}"#);
    assert!(stdout(&orbihear(&["csc", &no])).starts_with("csc: false"));

    let missing = write(dir.path(), "m.json", r#"{"n":2,"int_c1sq":0,"int_c2":0,"vol":1,"c1_omega":0}"#);
    let o = orbihear(&["csc", &missing]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error[MISSING_INPUT]"));
}

#[test]
fn roundtrip_is_deterministic() {
    let args = ["roundtrip", "--seed", "7", "--n", "2", "--facets", "6"];
    let a = orbihear(&args);
    let b = orbihear(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let out = stdout(&a);
    let h: f64 = out.lines().find_map(|l| l.strip_prefix("hausdorff: ")).unwrap().parse().unwrap();
    assert!(h < 1e-6);
    assert!(out.contains("labels_match: true"));
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["roundtrip", "--seed", "3", "--n", "3", "--facets", "6"];
    let one = Command::new(env!("CARGO_BIN_EXE_orbihear")).args(args).env("ORBIHEAR_THREADS", "1").output().unwrap();
    let many = orbihear(&args);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn readme_examples_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let readme = fs::read_to_string(root.join("README.md")).unwrap();
    let mut count = 0;
    for line in readme.lines() {
        let Some(cmd) = line.strip_prefix("$ orbihear ") else { continue };
        let o = Command::new(env!("CARGO_BIN_EXE_orbihear"))
            .args(cmd.split_whitespace())
            .current_dir(&root)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", stderr(&o));
        count += 1;
    }
    assert!(count >= 8);
}

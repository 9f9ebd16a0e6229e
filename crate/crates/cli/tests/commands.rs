use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn rectpierce(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rectpierce"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn json(p: &str) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

const TWO_SQUARES: &str = r#"{"r": 1, "rects": [
  {"id": 0, "x": [0, 1], "y": [0, 1]},
  {"id": 1, "x": [3, 4], "y": [0, 1]}
]}"#;

fn two_squares(dir: &TempDir) -> String {
    let p = path(dir, "b.json");
    fs::write(&p, TWO_SQUARES).unwrap();
    p
}

#[test]
fn generate_disjoint_grid() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "g.json");
    let out = rectpierce(&["generate", "--kind", "disjoint_grid", "--n", "4", "--out", &g]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&g);
    assert_eq!(v["rects"].as_array().unwrap().len(), 4);
    let exact = rectpierce(&["exact", &g, "--what", "nu"]);
    assert_eq!(String::from_utf8_lossy(&exact.stdout).trim(), r#"{"nu":4}"#);
}

#[test]
fn generate_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    for p in [&a, &b] {
        let out = rectpierce(&["generate", "--n", "50", "--r", "3", "--seed", "7", "--out", p]);
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let other = path(&dir, "c.json");
    rectpierce(&["generate", "--n", "50", "--r", "3", "--seed", "8", "--out", &other]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&other).unwrap());
}

#[test]
fn generate_rejects_zero() {
    let dir = TempDir::new().unwrap();
    let out = rectpierce(&["generate", "--n", "0", "--out", &path(&dir, "z.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert!(!dir.path().join("z.json").exists());
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(rectpierce(&["generate", "--n", "many"]).status.code(), Some(1));
    assert_eq!(rectpierce(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(rectpierce(&["generate", "--kind", "spiral", "--n", "3"]).status.code(), Some(1));
    assert_eq!(rectpierce(&["--help"]).status.code(), Some(0));
}

#[test]
fn pierce_then_verify() {
    let dir = TempDir::new().unwrap();
    let b = two_squares(&dir);
    let t = path(&dir, "t.json");
    let svg = path(&dir, "t.svg");
    let out = rectpierce(&["pierce", &b, "--out", &t, "--svg", &svg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res = json(&t);
    assert_eq!(res["points"].as_array().unwrap().len(), 5);
    assert_eq!(res["certificate"], serde_json::json!([0, 1]));
    assert_eq!(res["trace"][1]["kind"], "helly");
    assert_eq!(fs::read_to_string(&svg).unwrap().matches(r#"class="point""#).count(), 5);

    let rep = path(&dir, "rep.json");
    let out = rectpierce(&["verify", &b, &t, "--out", &rep]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&rep);
    assert_eq!(report["instance"], "b");
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn verify_catches_a_deleted_point() {
    let dir = TempDir::new().unwrap();
    let b = two_squares(&dir);
    let t = path(&dir, "t.json");
    rectpierce(&["pierce", &b, "--out", &t]);
    let mut res = json(&t);
    res["points"].as_array_mut().unwrap().pop();
    fs::write(&t, res.to_string()).unwrap();
    let out = rectpierce(&["verify", &b, &t]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_values() {
    let dir = TempDir::new().unwrap();
    let b = two_squares(&dir);
    let out = rectpierce(&["exact", &b, "--what", "tau,nu"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), r#"{"tau":2,"nu":2}"#);
    let out = rectpierce(&["exact", &b, "--what", "chi,omega"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), r#"{"chi":1,"omega":1}"#);
}

#[test]
fn exact_limits_have_their_own_exit_code() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "big.json");
    rectpierce(&["generate", "--n", "30", "--out", &g]);
    let out = rectpierce(&["exact", &g, "--what", "tau"]);
    assert_eq!(out.status.code(), Some(4));
    let out = rectpierce(&["exact", &g, "--what", "tau", "--max-n", "30", "--budget", "0"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn color_then_verify() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "k.json");
    rectpierce(&["generate", "--kind", "common_point_clique", "--n", "4", "--out", &g]);
    let c = path(&dir, "c.json");
    let out = rectpierce(&["color", &g, "--out", &c]);
    assert!(out.status.success());
    assert_eq!(json(&c)["num_colors"], 4);
    assert_eq!(rectpierce(&["verify", &g, &c]).status.code(), Some(0));

    // give vertex 1 the color of its neighbour 0
    let mut bad = json(&c);
    bad["colors"][1] = bad["colors"][0].clone();
    fs::write(&c, bad.to_string()).unwrap();
    assert_eq!(rectpierce(&["verify", &g, &c]).status.code(), Some(2));
}

#[test]
fn parse_errors() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.json");
    fs::write(&bad, r#"{"rects": [{"id": 0, "x": [1, 1], "y": [0, 1]}]}"#).unwrap();
    assert_eq!(rectpierce(&["pierce", &bad]).status.code(), Some(3));
    let missing = path(&dir, "missing.json");
    assert_eq!(rectpierce(&["pierce", &missing]).status.code(), Some(1));
    let b = two_squares(&dir);
    let junk = path(&dir, "junk.json");
    fs::write(&junk, r#"{"something": []}"#).unwrap();
    assert_eq!(rectpierce(&["verify", &b, &junk]).status.code(), Some(3));
}

#[test]
fn render_counts() {
    let dir = TempDir::new().unwrap();
    let one = path(&dir, "one.json");
    fs::write(&one, r#"{"rects": [{"id": 0, "x": [0, 1], "y": [0, 1]}]}"#).unwrap();
    let out = rectpierce(&["render", &one]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches("<rect").count(), 1);

    let wide = path(&dir, "wide.json");
    fs::write(&wide, r#"{"rects": [{"id": 0, "x": [0, 3], "y": [0, 1]}]}"#).unwrap();
    let svg_path = path(&dir, "grid.svg");
    let out = rectpierce(&["render", &wide, "--grid", "0", "--svg", &svg_path]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&svg_path).unwrap().matches(r#"<circle class="pgrid""#).count(), 8);
    assert_eq!(rectpierce(&["render", &wide, "--grid", "1"]).status.code(), Some(1));
}

#[test]
fn render_coloring_fills() {
    let dir = TempDir::new().unwrap();
    let g = path(&dir, "chain.json");
    rectpierce(&["generate", "--kind", "chain", "--n", "3", "--out", &g]);
    let c = path(&dir, "c.json");
    rectpierce(&["color", &g, "--out", &c]);
    let colors: Vec<u64> = json(&c)["colors"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
    let out = rectpierce(&["render", &g, "--result", &c]);
    let svg = String::from_utf8(out.stdout).unwrap();
    for (id, col) in colors.iter().enumerate() {
        assert!(svg.contains(&format!(r#"data-id="{id}" "#)));
        assert_eq!(svg.matches(&format!(r#"data-color="{col}""#)).count(), colors.iter().filter(|&&c| c == *col).count());
    }
}

fn fill_corpus(dir: &Path) {
    for seed in 0..4 {
        let p = dir.join(format!("s{seed}.json"));
        let out = rectpierce(&[
            "generate", "--n", "8", "--r", "2", "--seed", &seed.to_string(), "--window", "10",
            "--side-max", "4", "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
}

#[test]
fn batch_verify_and_stats() {
    let dir = TempDir::new().unwrap();
    fill_corpus(dir.path());
    let d = dir.path().to_str().unwrap();
    let summary_path = path(&dir, "summary.out");
    let out = rectpierce(&["verify", "--batch", d, "--out", &summary_path]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&summary_path);
    assert_eq!(summary["rows"].as_array().unwrap().len(), 4);
    assert_eq!(summary["all_verified"], true);
    assert!(summary["rows"].as_array().unwrap().iter().all(|r| r["tau_exact"].is_u64()));

    let out = rectpierce(&["stats", d, "--table"]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.starts_with("instance\t"));
    assert_eq!(table.lines().filter(|l| l.starts_with('s')).count(), 4);
}

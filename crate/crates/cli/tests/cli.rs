use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bondmatcher"));
    c.env_remove("RUST_LOG");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Two-site spec; `shift` moves the second site along x for every member.
fn two_site_spec(dir: &Path, name: &str, shift: f64, steps: Option<usize>) -> PathBuf {
    let mut spec = serde_json::json!({
        "sites": [
            {"pos": [-0.8, 0.1, 0.0], "amp": 10.0, "decay": 0.6},
            {"pos": [0.9 + shift, -0.1, 0.05], "amp": 3.0, "decay": 0.6}
        ],
        "grid": {"dims": [17, 17, 17], "spacing": [0.2, 0.2, 0.2], "origin": [-1.6, -1.6, -1.6]},
        "seed": 3
    });
    if let Some(steps) = steps {
        spec["ensemble"] = serde_json::json!({"directions": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0]], "steps": steps, "scale": 0.1});
    }
    let path = dir.join(name);
    std::fs::write(&path, spec.to_string()).unwrap();
    path
}

fn stdout_paths(o: &Output) -> Vec<PathBuf> {
    String::from_utf8(o.stdout.clone()).unwrap().lines().map(PathBuf::from).collect()
}

#[test]
fn analyze_writes_three_reports() {
    let dir = tempfile::tempdir().unwrap();
    let spec = two_site_spec(dir.path(), "pair.json", 0.0, None);
    let o = run(&["synth", spec.to_str().unwrap()], dir.path());
    ok(&o);
    let cube = dir.path().join("pair.cube");
    assert_eq!(stdout_paths(&o), vec![cube.clone()]);

    ok(&run(&["analyze", cube.to_str().unwrap()], dir.path()));
    let doc = read_json(&dir.path().join("pair.bonds.json"));
    assert_eq!(doc["tool"], "bondmatcher");
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["config"]["epsilon"], 1e-3);
    assert_eq!(doc["node_count"], 2);
    assert_eq!(doc["arc_count"], 1);

    let obj = std::fs::read_to_string(dir.path().join("pair.obj")).unwrap();
    assert!(obj.starts_with("# bondmatcher "));
    assert_eq!(obj.lines().filter(|l| l.starts_with("o node_")).count(), 2);
    assert_eq!(obj.lines().filter(|l| l.starts_with("l ")).count(), 1);

    let csv = std::fs::read_to_string(dir.path().join("pair.indicators.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "arc_id,node_a,node_b,bond_class,saddle_value,bcp_density,length_A,angle_deg,near_breaking,loop");
    assert_eq!(rows.len(), 2);
    assert!(!csv.contains('\r'));
}

#[test]
fn target_min_count_overrides_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let spec = two_site_spec(dir.path(), "pair.json", 0.0, None);
    ok(&run(&["synth", spec.to_str().unwrap()], dir.path()));
    let cube = dir.path().join("pair.cube");
    ok(&run(&["analyze", cube.to_str().unwrap(), "--target-min-count", "1"], dir.path()));
    let doc = read_json(&dir.path().join("pair.bonds.json"));
    assert_eq!(doc["config"]["target_min_count"], 1);
    assert_eq!(doc["node_count"], 1);
}

#[test]
fn corrupted_cube_exits_two_and_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cube");
    std::fs::write(
        &path,
        "t\nc\n    0 0.0 0.0 0.0\n    2 1.0 0.0 0.0\n    2 0.0 1.0 0.0\n    2 0.0 0.0 1.0\n0 1 2 3\n4 five 6 7\n",
    )
    .unwrap();
    let o = run(&["analyze", path.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["exit_code"], 2);
    assert_eq!(err["error"]["kind"], "parse");
    assert_eq!(err["error"]["line"], 8);
    assert!(err["error"]["path"].as_str().unwrap().ends_with("bad.cube"));
}

#[test]
fn missing_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["analyze", "no/such/file.cube"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn match_identity_and_size_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let one = two_site_spec(dir.path(), "one.json", 0.0, None);
    let two = two_site_spec(dir.path(), "two.json", 0.1, None);
    ok(&run(&["synth", one.to_str().unwrap()], dir.path()));
    ok(&run(&["synth", two.to_str().unwrap()], dir.path()));
    let a = dir.path().join("one.cube");
    let b = dir.path().join("two.cube");

    ok(&run(&["match", a.to_str().unwrap(), a.to_str().unwrap()], dir.path()));
    let doc = read_json(&dir.path().join("match.json"));
    assert_eq!(doc["total"], true);
    assert_eq!(doc["assignment"]["map"], serde_json::json!([0, 1]));

    ok(&run(&["match", a.to_str().unwrap(), b.to_str().unwrap()], dir.path()));
    assert_eq!(read_json(&dir.path().join("match.json"))["total"], true);

    // a single-node graph against a two-node graph
    let single = dir.path().join("single");
    std::fs::create_dir(&single).unwrap();
    let three = dir.path().join("three.json");
    let mut spec = read_json(&one);
    spec["sites"].as_array_mut().unwrap().truncate(1);
    std::fs::write(&three, spec.to_string()).unwrap();
    ok(&run(&["synth", three.to_str().unwrap()], &single));
    let c = single.join("three.cube");
    let o = run(&["match", a.to_str().unwrap(), c.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "size_mismatch");
}

#[test]
fn ensemble_of_copies_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = two_site_spec(dir.path(), "copies.json", 0.0, Some(3));
    let members = dir.path().join("members");
    std::fs::create_dir(&members).unwrap();
    let o = run(&["synth", spec.to_str().unwrap(), "--format", "raw"], &members);
    ok(&o);
    assert_eq!(stdout_paths(&o).len(), 3);
    assert!(members.join("copies_00.raw").exists());

    ok(&run(&["ensemble", members.to_str().unwrap()], dir.path()));
    let doc = read_json(&dir.path().join("occurrence.json"));
    assert_eq!(doc["members"], 3);
    assert_eq!(doc["reference"], 1);
    assert!(doc["rates"].as_array().unwrap().iter().all(|r| r == 1.0));
    assert_eq!(doc["unstable_bonds"], 0);
    let csv = std::fs::read_to_string(dir.path().join("occurrence.csv")).unwrap();
    assert!(csv.contains("# members 3\n"));
    assert!(csv.contains("reference_id,arc_id,bond_class,rate,stable,bcp_density,length_A,angle_deg\n"));
    assert!(dir.path().join("reference.bonds.json").exists());
}

#[test]
fn two_member_pair_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let members = dir.path().join("members");
    std::fs::create_dir(&members).unwrap();
    ok(&run(&["synth", fixture("pair.json").to_str().unwrap(), "--prefix", "pair"], &members));
    ok(&run(&["ensemble", members.to_str().unwrap()], dir.path()));
    let doc = read_json(&dir.path().join("occurrence.json"));
    assert_eq!(doc["reference"], 0);
    let mut rates: Vec<f64> = doc["rates"].as_array().unwrap().iter().map(|r| r.as_f64().unwrap()).collect();
    rates.sort_by(f64::total_cmp);
    rates.dedup();
    assert_eq!(rates, vec![0.5, 1.0]);

    let a = members.join("pair_00.cube");
    let b = members.join("pair_01.cube");
    ok(&run(&["match", a.to_str().unwrap(), b.to_str().unwrap()], dir.path()));
    let m = read_json(&dir.path().join("match.json"));
    assert_eq!(m["total"], false);
    assert!(!m["isomorphism"]["unmatched_i"].as_array().unwrap().is_empty());
    assert!(!m["isomorphism"]["unmatched_j"].as_array().unwrap().is_empty());
}

#[test]
fn synth_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = two_site_spec(dir.path(), "noisy.json", 0.0, Some(2));
    let mut v = read_json(&spec);
    v["noise"] = serde_json::json!(0.01);
    std::fs::write(&spec, v.to_string()).unwrap();
    let (x, y) = (dir.path().join("x"), dir.path().join("y"));
    std::fs::create_dir(&x).unwrap();
    std::fs::create_dir(&y).unwrap();
    for d in [&x, &y] {
        ok(&run(&["synth", spec.to_str().unwrap()], d));
    }
    for name in ["noisy_00.cube", "noisy_01.cube"] {
        assert_eq!(std::fs::read(x.join(name)).unwrap(), std::fs::read(y.join(name)).unwrap());
    }
    assert_ne!(std::fs::read(x.join("noisy_00.cube")).unwrap(), std::fs::read(x.join("noisy_01.cube")).unwrap());
}

#[test]
fn hexamer_bond_graph() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = read_json(&fixture("hexamer.json"));
    spec.as_object_mut().unwrap().remove("ensemble");
    let path = dir.path().join("hexamer.json");
    std::fs::write(&path, spec.to_string()).unwrap();
    ok(&run(&["synth", path.to_str().unwrap(), "--format", "raw"], dir.path()));
    let raw = dir.path().join("hexamer.raw");
    ok(&run(&["analyze", raw.to_str().unwrap(), "--target-min-count", "18"], dir.path()));
    let doc = read_json(&dir.path().join("hexamer.bonds.json"));
    assert_eq!(doc["node_count"], 18);
    assert_eq!(doc["class_counts"]["covalent"], 12);
}

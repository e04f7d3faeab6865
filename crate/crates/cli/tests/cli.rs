use std::process::{Command, Output};

use serde_json::Value;

fn carpetq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carpetq")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = carpetq(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

#[test]
fn optimal_three_has_four_documents() {
    let v = json(&["optimal", "--n", "3", "--limit", "10"]);
    assert_eq!(v.as_array().unwrap().len(), 4);
    assert_eq!(v[0]["provenance"], "constructed");
    assert_eq!(v[0]["points"][2], serde_json::json!(["1/2", "5/6"]));
}

#[test]
fn optimal_four_is_unique() {
    let v = json(&["optimal", "--n", "4"]);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["points"][0], serde_json::json!(["1/6", "1/6"]));
    assert_eq!(v[0]["decomposition"]["level"], 1);
}

#[test]
fn optimal_five_with_fixed_t() {
    let v = json(&["optimal", "--n", "5", "--t", "1"]);
    assert_eq!(v.as_array().unwrap().len(), 2);
    let all = json(&["optimal", "--n", "5"]);
    assert_eq!(all.as_array().unwrap().len(), 8);
    let one = json(&["optimal", "--n", "5", "--t", "1", "--variants", "1,0,0,0"]);
    assert_eq!(one.as_array().unwrap().len(), 1);
    assert_eq!(one[0]["points"][0], serde_json::json!(["1/6", "1/18"]));
}

#[test]
fn invalid_t_exits_two() {
    for t in ["12", "1,2", "7", ""] {
        let out = carpetq(&["optimal", "--n", "5", "--t", t]);
        assert_eq!(out.status.code(), Some(2), "t = {t:?}");
    }
    assert_eq!(carpetq(&["optimal", "--n", "5", "--t", "1", "--variants", "2,0,0,0"]).status.code(), Some(2));
    assert_eq!(carpetq(&["optimal", "--bogus"]).status.code(), Some(2));
}

#[test]
fn error_table() {
    let csv = stdout(&["error", "--n", "2,3,5"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines, ["n,v_n,decimal", "2,5/36,0.138889", "3,1/12,0.083333", "5,2/81,0.024691"]);
}

#[test]
fn lloyd_recovers_two_means() {
    let v = json(&["lloyd", "--n", "2", "--depth", "5", "--restarts", "64", "--seed", "42"]);
    assert_eq!(v["corrected_distortion"]["exact"], "5/36");
    assert_eq!(v["codebook"]["provenance"], "lloyd");
    assert!(v["matched_optimal"].is_number());
    let again = json(&["lloyd", "--n", "2", "--depth", "5", "--restarts", "64", "--seed", "42"]);
    assert_eq!(v, again);
    let one = json(&["lloyd", "--n", "1", "--depth", "3", "--restarts", "1", "--seed", "0"]);
    assert_eq!(one["corrected_distortion"]["exact"], "1/4");
}

#[test]
fn dimension_and_coefficient_reports() {
    let csv = stdout(&["dimension", "--levels", "1,1000"]);
    let last: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
    assert_eq!(last[0], "1000");
    assert!(last[3].parse::<f64>().unwrap() < 1e-3);

    let csv = stdout(&["coefficient", "--levels", "10", "--grid", "64"]);
    assert!(csv.starts_with("ell,n,x,v_n_num,v_n_den,scaled,g_or_h,f_paper\n"));
    assert_eq!(csv.lines().count(), 65);
    let v = json(&["coefficient", "--levels", "10", "--grid", "64", "--format", "json"]);
    assert!((v["inf_observed"].as_f64().unwrap() - 0.25).abs() < 1e-4);
    assert!(v["sup_observed"].as_f64().unwrap() - v["inf_observed"].as_f64().unwrap() > 0.2);
}

#[test]
fn render_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("n16.svg");
    stdout(&["render", "--n", "16", "--carpet-depth", "3", "--out", path.to_str().unwrap()]);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert_eq!(svg.matches("<circle").count(), 16);
    assert!(svg.contains(r#"cx="50.000" cy="850.000""#));

    let one = stdout(&["render", "--n", "1", "--carpet-depth", "2"]);
    assert_eq!(one.matches("<circle").count(), 1);
    assert!(one.contains(r#"cx="450.000" cy="450.000""#));
    assert_eq!(one, stdout(&["render", "--n", "1", "--carpet-depth", "2"]));

    let three = stdout(&["render", "--n", "3"]);
    for c in [r#"cx="150.000" cy="750.000""#, r#"cx="750.000" cy="750.000""#, r#"cx="450.000" cy="150.000""#] {
        assert!(three.contains(c), "{c}");
    }

    let bad = carpetq(&["render", "--n", "3", "--out", dir.path().join("missing/x.svg").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(3));
    assert_eq!(carpetq(&["render", "--n", "3", "--carpet-depth", "8"]).status.code(), Some(2));
}

#[test]
fn documents_round_trip_through_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("six.json");
    stdout(&["optimal", "--n", "6", "--limit", "5", "--out", path.to_str().unwrap()]);
    let v = json(&["bounds", "--file", path.to_str().unwrap(), "--depth", "3"]);
    let docs = v.as_array().unwrap();
    assert_eq!(docs.len(), 5);
    for d in docs {
        assert_eq!(d["bounds"]["lo"], "7/324");
        assert_eq!(d["bounds"]["exact"], true);
    }
    let svg = stdout(&["render", "--file", path.to_str().unwrap(), "--doc", "4"]);
    assert_eq!(svg.matches("<circle").count(), 6);

    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(carpetq(&["bounds", "--file", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(carpetq(&["bounds", "--file", "/no/such/file.json"]).status.code(), Some(2));
}

#[test]
fn thread_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_carpetq"))
        .args(["error", "--n", "4"])
        .env("CARPETQ_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_carpetq"))
        .args(["error", "--n", "4"])
        .env("CARPETQ_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn atoms_and_trap() {
    let csv = stdout(&["atoms", "--depth", "1"]);
    assert_eq!(csv.lines().nth(1).unwrap(), "1,1,6,1,6,1,4");
    let v = json(&["trap", "--depth", "6"]);
    assert_eq!(v["diagonal"]["is_trap"], true);
    assert_eq!(v["beta3"]["is_trap"], true);
    assert_eq!(v["beta3"]["exact_distortion"]["exact"], "233/2700");
}

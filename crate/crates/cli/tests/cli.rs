use std::process::{Command, Output};

fn pkernel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pkernel")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn trivial_height_one_table() {
    let o = pkernel(&["incidence", "--height", "1", "--dim", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows, ["eo,0", "[1],true"]);
}

#[test]
fn check_supersingular_cell() {
    let o = pkernel(&["check", "--height", "2", "--dim", "1", "--eo", "[2,1]", "--np", "1/2x2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("true"));
    let v: serde_json::Value = serde_json::from_str(lines.next().unwrap()).unwrap();
    assert_eq!(v["value"], true);
    assert!(v["witness"].is_object());
}

#[test]
fn superspecial_type_misses_ordinary() {
    let o = pkernel(&["check", "--height", "2", "--dim", "1", "--eo", "[1,2]", "--np", "0,1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("false"));
}

#[test]
fn cochars_of_block_one_two() {
    let o = pkernel(&["enumerate-cochars", "--block", "1,2"]);
    assert!(o.status.success());
    let v: Vec<Vec<i64>> = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v, vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1]]);
}

#[test]
fn json_table_embeds_manifest() {
    let o = pkernel(&["incidence", "--height", "3", "--dim", "1", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["manifest"]["rule"], "full_support");
    assert!(v["version"].is_string());
}

#[test]
fn exit_codes() {
    assert_eq!(pkernel(&["check", "--height", "2", "--dim", "1", "--eo", "[3,1]", "--np", "0,1"]).status.code(), Some(2));
    assert_eq!(pkernel(&["incidence", "--height", "2", "--dim", "3"]).status.code(), Some(2));
    assert_eq!(pkernel(&["adlv", "--x", "garbage", "--np", "0,1"]).status.code(), Some(2));
    assert_eq!(pkernel(&["incidence", "--height", "7", "--dim", "3"]).status.code(), Some(3));
    assert_eq!(pkernel(&["incidence", "--height", "3", "--dim", "1", "--max-height", "2"]).status.code(), Some(3));
}

#[test]
fn deterministic_outputs() {
    let runs = |args: &[&str]| (stdout(&pkernel(args)), stdout(&pkernel(args)));
    let (a, b) = runs(&["incidence", "--height", "4", "--dim", "2"]);
    assert_eq!(a, b);
    let (a, b) = runs(&["oracle", "sample", "--height", "3", "--dim", "1", "--count", "20", "--seed", "5"]);
    assert_eq!(a, b);
    let seq = stdout(&pkernel(&["incidence", "--height", "4", "--dim", "2", "--sequential"]));
    assert_eq!(a.lines().count(), 20);
    let par = stdout(&pkernel(&["incidence", "--height", "4", "--dim", "2"]));
    assert_eq!(seq, par);
}

#[test]
fn calibrate_writes_manifest_usable_by_incidence() {
    let dir = std::env::temp_dir().join(format!("pkernel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("manifest.json");
    let p = path.to_str().unwrap();
    let o = pkernel(&["calibrate", "--samples", "200", "--out", p]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["disputed"]["value"], true);
    let o = pkernel(&["incidence", "--height", "2", "--dim", "1", "--manifest", p]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"[2,1]\",true,true"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn oracle_verify_is_clean() {
    let o = pkernel(&["oracle", "verify", "--height", "2", "--dim", "1", "--count", "50"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ok"], true);
}

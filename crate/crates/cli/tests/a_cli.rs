use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn khcover(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_khcover")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out, err) = khcover(args);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap()
}

fn path(name: &str) -> String {
    corpus(name).to_string_lossy().into_owned()
}

#[test]
fn kh_reduced_trefoil() {
    let v = json(&["kh", "--reduced", &path("trefoil.pd")]);
    assert_eq!(v["result"]["total_rank"], 3);
    assert_eq!(v["result"]["reduced"], true);
    assert_eq!(v["conventions_version"], khcover::CONVENTIONS_VERSION);
}

#[test]
fn kh_unreduced_and_mirror() {
    let v = json(&["kh", &path("trefoil.pd")]);
    let m = json(&["kh", "--mirror", &path("trefoil.pd")]);
    assert_eq!(v["result"]["total_rank"], 6);
    let mut a: Vec<Vec<i64>> = serde_json::from_value(v["result"]["gradings"].clone()).unwrap();
    let mut b: Vec<Vec<i64>> = serde_json::from_value(m["result"]["gradings"].clone()).unwrap();
    for g in &mut b {
        g[0] = -g[0];
        g[1] = -g[1];
    }
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn kh_torus_knot() {
    let v = json(&["kh", "--reduced", &path("t35.pd")]);
    assert!(v["result"]["total_rank"].as_u64().unwrap() >= 3);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pd");
    std::fs::write(&bad, "X[1,2,3").unwrap();
    let (code, _, err) = khcover(&["kh", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("bad.pd"));
    let (code, _, _) = khcover(&["kh", dir.path().join("missing.pd").to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn budget_exhaustion_exits_3() {
    let (code, _, err) = khcover(&["kh", "--budget", "0", &path("t35.pd")]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn dinv_tables() {
    let v = json(&["dinv", &path("nine40.pd")]);
    assert_eq!(v["result"]["classes"].as_array().unwrap().len(), 75);
    assert_eq!(v["result"]["det"], "75");
    let h = json(&["dinv", &path("hopf.pd")]);
    assert_eq!(h["result"]["classes"].as_array().unwrap().len(), 2);
    let (code, out, _) = khcover(&["dinv", "--format", "csv", &path("nine40.pd")]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("# conventions_version="));
    assert_eq!(lines[1], "file,label_1,label_2,d");
    assert_eq!(lines.len(), 77);
}

#[test]
fn dinv_rejects_non_alternating() {
    let (code, _, _) = khcover(&["dinv", &path("t35.pd")]);
    assert_eq!(code, 4);
}

#[test]
fn bounds_reports() {
    let v = json(&["bounds", &path("t35.pd"), &path("unknot.pd"), &path("nine47.pd")]);
    let r: Vec<&Value> = v.as_array().unwrap().iter().map(|x| &x["result"]).collect();
    assert_eq!((r[0]["det"].as_i64(), r[0]["kh_rank"].as_i64(), r[0]["collapsed"].as_bool()), (Some(1), Some(7), Some(false)));
    assert_eq!((r[1]["det"].as_i64(), r[1]["kh_rank"].as_i64()), (Some(1), Some(1)));
    assert_eq!(r[2]["det"], r[2]["kh_rank"]);
}

#[test]
fn qa_outcomes() {
    let u = json(&["qa", &path("unknot.pd")]);
    assert_eq!(u["result"]["result"], "certified");
    assert_eq!(u["result"]["certificate"]["node"]["kind"], "leaf");
    let t = json(&["qa", "--budget", "10s", &path("t35.pd")]);
    assert_eq!(t["result"]["result"], "unknown");
    let (code, out, _) = khcover(&["qa", "--format", "text", &path("trefoil.pd")]);
    assert_eq!(code, 0);
    assert!(out.contains("det 3 = "));
}

#[test]
fn spectral_pages_of_trefoil() {
    let v = json(&["ss", &path("trefoil.pd")]);
    assert_eq!(v["result"]["total_homology_rank"], 3);
    let e2: Vec<usize> = serde_json::from_value(v["result"]["pages"][1]["ranks_by_level"].clone()).unwrap();
    assert_eq!(e2.iter().sum::<usize>(), 3);
}

#[test]
fn batch_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["k3_1.pd", "k5_2.pd", "figure8.pd", "hopf.pd", "k7_4.pd", "t35.pd"] {
        std::fs::copy(corpus(name), dir.path().join(name)).unwrap();
    }
    let d = dir.path().to_str().unwrap();
    let runs: Vec<String> = ["1", "4"]
        .iter()
        .map(|t| {
            let (code, out, _) = khcover(&["bounds", "--format", "csv", "--threads", t, d]);
            assert_eq!(code, 0);
            out
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0].lines().count(), 8);
}

#[test]
fn every_format_carries_conventions() {
    for fmt in ["json", "csv", "text"] {
        let (_, out, _) = khcover(&["det", "--format", fmt, &path("figure8.pd")]);
        assert!(out.contains(khcover::CONVENTIONS_VERSION), "{fmt}");
    }
}

#[test]
fn det_of_corpus() {
    let v = json(&["det", &path("nine47.pd")]);
    assert_eq!(v["result"]["det"], 27);
    assert_eq!(v["result"]["alternating"], false);
}

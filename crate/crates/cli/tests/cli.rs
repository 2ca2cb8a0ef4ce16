use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/resources/fixtures/projects")
}

fn lidetect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lidetect"))
        .args(args)
        .env_remove("LIDETECT_SPDX_DB")
        .output()
        .expect("binary runs")
}

fn analyze(project: &str, extra: &[&str]) -> Output {
    let root = fixtures().join(project);
    let mut args = vec!["analyze", root.to_str().unwrap(), "--offline"];
    args.extend_from_slice(extra);
    lidetect(&args)
}

#[test]
fn compatible_project_exits_zero() {
    let out = analyze("mit_only", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"], false);
}

#[test]
fn conflicting_project_exits_one() {
    let out = analyze("bsd_dnr", &[]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"], true);
    assert_eq!(report["conflicts"].as_array().unwrap().len(), 1);
}

#[test]
fn text_format_names_the_conflict() {
    let out = analyze("credit_clash", &["--format", "text", "--sequential"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Give Credit"), "{text}");
    assert!(text.contains("verdict: incompatible"), "{text}");
}

#[test]
fn missing_model_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = analyze("mit_only", &["--model", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));
}

#[test]
fn missing_project_exits_two() {
    let out = lidetect(&["analyze", "/definitely/not/here", "--offline"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_corpus_reports_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.tsv");
    fs::write(&corpus, "You\tO\nmay\tO\n\nredistribute\tB-Distribute\tX\n").unwrap();
    let model = dir.path().join("m.json");
    let out = lidetect(&["train", "--corpus", corpus.to_str().unwrap(), "-o", model.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('4'), "{err}");
    assert!(!model.exists());
}

#[test]
fn explain_shows_both_sides() {
    let root = fixtures().join("bsd_dnr");
    let out = lidetect(&["explain", root.to_str().unwrap(), "--term", "distribute", "--offline", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let ex: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let attitudes: Vec<&str> = ex["licenses"].as_array().unwrap().iter().map(|l| l["attitude"].as_str().unwrap()).collect();
    assert_eq!(attitudes, ["CAN", "CANNOT"]);
}

#[test]
fn eval_scores_bundled_model() {
    let testset = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/resources/corpus/labeled.tsv");
    let model = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/resources/model.json");
    let out = lidetect(&[
        "eval",
        "--model",
        model.to_str().unwrap(),
        "--testset",
        testset.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(m["f1"].as_f64().unwrap() > 0.7);
}

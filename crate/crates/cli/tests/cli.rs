use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/resources/corpus/fixture.json")
}

fn laug(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laug")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = laug(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).display().to_string()
}

#[test]
fn augment_is_byte_identical_under_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture().display().to_string();
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    for out in [&a, &b] {
        ok(&["augment", "--in", &input, "--out", out, "--method", "sd", "--seed", "7"]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{a}.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["methods"], serde_json::json!(["SD"]));
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn stats_on_disfluency_output_keeps_every_value() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture().display().to_string();
    let records = path(&dir, "sd.json");
    let report = path(&dir, "report.json");
    ok(&["augment", "--in", &input, "--out", &records, "--method", "sd"]);
    ok(&["stats", "--in", &input, "--records", &records, "--out", &report]);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["change_rates"]["slot_rate"], 0.0);
    assert_eq!(r["change_rates"]["records"], 200);
}

#[test]
fn compose_is_reproducible_and_sized() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture().display().to_string();
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    for out in [&a, &b] {
        ok(&["compose", "--in", &input, "--out", out, "--seed", "7", "--ratio", "0.5", "--methods", "wp,sr"]);
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let c: Value = serde_json::from_slice(&bytes).unwrap();
    let augmented = c["dialogs"].as_array().unwrap().iter().filter(|d| !d["augmented_from"].is_null()).count();
    assert_eq!(augmented, 60);
}

#[test]
fn baseline_prints_five_scores_with_original_highest() {
    let input = fixture().display().to_string();
    let table = ok(&["baseline", "--in", &input]);
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap().split_whitespace().collect::<Vec<_>>(), ["Ori.", "WP", "TP", "SR", "SD"]);
    let scores: Vec<f64> = lines.next().unwrap().split_whitespace().map(|s| s.parse().unwrap()).collect();
    assert_eq!(scores.len(), 5);
    assert!(scores[1..].iter().all(|s| *s < scores[0]), "{scores:?}");
}

#[test]
fn eval_scores_gold_as_perfect() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture().display().to_string();
    let corpus: Value = serde_json::from_str(&std::fs::read_to_string(fixture()).unwrap()).unwrap();
    let gold: Vec<Value> = corpus["dialogs"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|d| d["split"] == "test")
        .flat_map(|d| d["turns"].as_array().unwrap().iter())
        .filter(|t| t["speaker"] == "user")
        .map(|t| t["da"].clone())
        .collect();
    let preds = path(&dir, "pred.json");
    std::fs::write(&preds, serde_json::to_string(&gold).unwrap()).unwrap();
    let report = path(&dir, "f1.json");
    ok(&["eval", "--in", &input, "--predictions", &preds, "--out", &report]);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["f1"]["f1"], 1.0);

    std::fs::write(&preds, "[[]]").unwrap();
    assert_eq!(laug(&["eval", "--in", &input, "--predictions", &preds]).status.code(), Some(2));
}

#[test]
fn exit_codes_separate_validation_from_io() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture().display().to_string();
    let out = path(&dir, "x.json");

    let bad = laug(&["compose", "--in", &input, "--out", &out, "--ratio=0"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`ratio`"));

    let bad = laug(&["augment", "--in", &input, "--out", &out, "--method", "wp", "--alpha", "1.5"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("`wp.alpha`"));

    let missing = laug(&["augment", "--in", "/nonexistent/corpus.json", "--out", &out, "--method", "sd"]);
    assert_eq!(missing.status.code(), Some(3));

    let broken = path(&dir, "broken.json");
    std::fs::write(
        &broken,
        r#"{"dialogs": [{"id": "b", "split": "train", "turns": [{"speaker": "user", "text": "to Ely",
            "da": [{"domain": "train", "intent": "inform", "slot": "dest", "value": "Ely"}],
            "spans": [{"item": 0, "start": 0, "end": 2}]}]}]}"#,
    )
    .unwrap();
    let invalid = laug(&["augment", "--in", &broken, "--out", &out, "--method", "sd"]);
    assert_eq!(invalid.status.code(), Some(2));
    assert!(!Path::new(&out).exists());
}

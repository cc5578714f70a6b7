use std::path::Path;
use std::process::{Command, Output};

fn laylens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laylens"))
        .args(args)
        .env_remove("LAYLENS_JOBS")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_writes_pages_manifest_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    let o = laylens(&["gen", "--preset", "source8", "--seed", "7", "--n-docs", "20", "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_dir(out.join("images")).unwrap().count(), 20);
    assert!(out.join("manifest.json").is_file());
    assert!(out.join("run_config.json").is_file());

    // the echoed config alone reproduces the run
    let again = dir.path().join("e");
    let cfg = out.join("run_config.json");
    let o = laylens(&["gen", "--config", p(&cfg), "--out", p(&again)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["manifest.json", "run_config.json", "images/doc_000013.pgm"] {
        assert_eq!(std::fs::read(out.join(name)).unwrap(), std::fs::read(again.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n_docs": 3, "seed": 5}"#).unwrap();
    let out = dir.path().join("d");
    let o = laylens(&["gen", "--config", p(&cfg), "--n-docs", "2", "--out", p(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let echoed: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("run_config.json")).unwrap()).unwrap();
    assert_eq!(echoed["n_docs"], 2);
    assert_eq!(echoed["seed"], 5);
    assert_eq!(echoed["margin"], 40);
}

#[test]
fn protocol_prints_two_row_curve() {
    let o = laylens(&[
        "protocol",
        "--preset",
        "synthetic-invoice",
        "--detections",
        "gt",
        "--k-list",
        "10,20",
        "--seed",
        "1",
        "--no-baseline",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let e2e_rows = text.lines().filter(|l| l.contains("end2end") && l.contains("micro")).count();
    assert_eq!(e2e_rows, 2, "{text}");
}

#[test]
fn usage_errors_exit_one() {
    let o = laylens(&["gen", "--preset", "source8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--out"));
    let o = laylens(&["protocol", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).to_lowercase().contains("usage"));
    let o = laylens(&["train", "--out", "/nonexistent/model.json"]);
    assert_eq!(o.status.code(), Some(1));
    let o = laylens(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
}

fn small_corpus(dir: &Path) -> std::path::PathBuf {
    let out = dir.join("corpus");
    let o = laylens(&[
        "gen",
        "--preset",
        "synthetic-invoice",
        "--n-docs",
        "16",
        "--test-size",
        "6",
        "--out",
        p(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    out.join("manifest.json")
}

#[test]
fn ingest_validates_detection_files() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_corpus(dir.path());
    let dets = dir.path().join("dets.json");

    std::fs::write(
        &dets,
        r#"{"docs":[{"doc_id":"doc_000000","regions":[{"bbox":[1,1,10,10],"label":"foreground","score":0.5}]}]}"#,
    )
    .unwrap();
    let o = laylens(&["ingest", "--manifest", p(&manifest), "--detections", p(&dets)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("1 documents, 1 regions"));

    std::fs::write(&dets, r#"{"docs":[{"doc_id":"nope_17","regions":[]}]}"#).unwrap();
    let o = laylens(&["ingest", "--manifest", p(&manifest), "--detections", p(&dets)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope_17"));

    std::fs::write(
        &dets,
        r#"{"docs":[{"doc_id":"doc_000000","regions":[{"bbox":[1,1,10,10],"label":"foreground","score":1.2}]}]}"#,
    )
    .unwrap();
    let o = laylens(&["ingest", "--manifest", p(&manifest), "--detections", p(&dets)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1.2"));
}

#[test]
fn segment_train_classify_eval_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = small_corpus(dir.path());
    let m = p(&manifest);
    let before = std::fs::read(&manifest).unwrap();

    let blocks = dir.path().join("ds/blocks.json");
    let o = laylens(&["docstrum", "--images", m, "--out", p(&blocks)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(dir.path().join("ds/run_config.json").is_file());

    let model = dir.path().join("tr/model.json");
    let o = laylens(&["train", "--manifest", m, "--k", "8", "--epochs", "100", "--out", p(&model)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let labelled = dir.path().join("cl/labelled.json");
    let src = format!("file:{}", p(&blocks));
    let o = laylens(&[
        "classify",
        "--manifest",
        m,
        "--model",
        p(&model),
        "--detections",
        &src,
        "--out",
        p(&labelled),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));

    let report = dir.path().join("ev/report");
    let o = laylens(&[
        "eval",
        "--manifest",
        m,
        "--detections",
        p(&labelled),
        "--mode",
        "end2end",
        "--out",
        p(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("ev/report.csv")).unwrap();
    assert!(csv.starts_with("k,precision,recall,f1,mode,aggregation\n"));
    assert_eq!(csv.lines().count(), 3);

    // evaluating training documents is refused
    let all = dir.path().join("all.json");
    let o = laylens(&["docstrum", "--images", m, "--split", "all", "--out", p(&all)]);
    assert!(o.status.success());
    let o = laylens(&["eval", "--manifest", m, "--detections", p(&all), "--out", p(&report)]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(std::fs::read(&manifest).unwrap(), before, "inputs are never modified");
}

#[test]
fn invalid_mode_is_usage_error() {
    let o = laylens(&["eval", "--manifest", "m.json", "--detections", "d.json", "--mode", "fuzzy", "--out", "r"]);
    assert_eq!(o.status.code(), Some(1));
}

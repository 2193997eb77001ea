use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

use roiml::corpus::read_corpus_csv;
use roiml::report::parse_curve_csv;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn roiml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roiml"))
        .args(args)
        .env("ROIML_LOG", "error")
        .output()
        .expect("spawn roiml")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_config(dir: &Path) -> Value {
    json!({
        "dataset": { "source": "synthetic", "spec": { "n_pairs": 200, "seed": 5 } },
        "sampling": { "seed": 11, "test_fraction": 0.2 },
        "classifier": { "kind": "random_forest", "tuning": "off", "forest": { "n_trees": 10 } },
        "economics": {
            "preset": "desk-scale",
            "scenarios": [{ "name": "costly-misses", "overrides": { "cost_fn": 5000 } }]
        },
        "output": dir.join("out"),
    })
}

fn write_config(dir: &Path, config: &Value) -> PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, serde_json::to_string_pretty(config).unwrap()).unwrap();
    path
}

#[test]
fn validate_config_echoes_economics() {
    let config = repo_root().join("configs/table5-default.json");
    let o = roiml(&["validate-config", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    for line in ["cost_fn=25000", "cost_fp=10000", "value_prod=4000000", "c_hr=70", "n_hr=10", "minutes_per_sample=1.8"] {
        assert!(text.lines().any(|l| l == line), "missing `{line}` in\n{text}");
    }
}

#[test]
fn shipped_configs_validate() {
    for name in ["table5-default.json", "typo3-sample.json", "synthetic-desk-scale.json"] {
        let config = repo_root().join("configs").join(name);
        let o = roiml(&["validate-config", "--config", config.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
    }
}

#[test]
fn missing_seed_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_config(dir.path());
    config["sampling"].as_object_mut().unwrap().remove("seed");
    let path = write_config(dir.path(), &config);
    let o = roiml(&["validate-config", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_str(stderr(&o).lines().next().unwrap()).unwrap();
    assert_eq!(err["error"]["kind"], "validation");
    assert!(err["error"]["message"].as_str().unwrap().contains("sampling.seed"));
}

#[test]
fn seed_flag_satisfies_missing_seed() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_config(dir.path());
    config["sampling"].as_object_mut().unwrap().remove("seed");
    let path = write_config(dir.path(), &config);
    let o = roiml(&["validate-config", "--config", path.to_str().unwrap(), "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("seed=3"));
}

#[test]
fn unknown_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = small_config(dir.path());
    config["economics"]["typo"] = json!(1);
    let path = write_config(dir.path(), &config);
    let o = roiml(&["validate-config", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(roiml(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(roiml(&["curve"]).status.code(), Some(64));
    assert_eq!(roiml(&["--help"]).status.code(), Some(0));
}

#[test]
fn curve_writes_requested_points_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &small_config(dir.path()));
    let o = roiml(&[
        "curve",
        "--config",
        path.to_str().unwrap(),
        "--fractions",
        "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    let records = parse_curve_csv(fs::File::open(out.join("rf.curve.csv")).unwrap()).unwrap();
    let fractions: Vec<f64> = records.iter().map(|r| r.fraction).collect();
    assert_eq!(fractions, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8]);
    assert_eq!(records.iter().map(|r| r.n_train).collect::<Vec<_>>(), vec![20, 40, 60, 80, 100, 120, 140, 160]);
    assert!(records.iter().all(|r| r.n_test == 40));

    let manifest: Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "curve");
    assert_eq!(manifest["seed"], 11);
    let files = manifest["files"].as_array().unwrap();
    for f in files {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"], roiml::cli::sha256_hex(&bytes));
    }
    assert!(files.iter().any(|f| f["path"] == "rf.decisions.json"));
}

#[test]
fn report_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    let path = write_config(dir.path(), &config);
    let run = |out: &str| {
        let out = dir.path().join(out);
        let o = roiml(&["report", "--config", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let summary = fs::read_to_string(a.join("summary.md")).unwrap();
    assert!(summary.contains("costly-misses"));
    for name in ["rf.curve.csv", "f1.svg", "roi.svg", "scenarios.json", "summary.md"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name} differs");
    }
}

#[test]
fn pairs_then_external_compare() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &small_config(dir.path()));
    let o = roiml(&["pairs", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    let corpus = read_corpus_csv(fs::File::open(out.join("corpus.csv")).unwrap()).unwrap();
    assert_eq!(corpus.len(), 200);

    // An oracle technique that is always right on the held-out pairs.
    let test_set = roiml::corpus::split(&corpus, 0.2, 11).unwrap().test_set;
    let labels = corpus.labels();
    let preds = dir.path().join("preds");
    fs::create_dir(&preds).unwrap();
    for f in ["0.40", "0.80"] {
        let mut text = String::from("pair_id,true_label,predicted_label,score\n");
        for &i in &test_set {
            let l = u8::from(labels[i]);
            text.push_str(&format!("{},{l},{l},{l}\n", corpus.pair_ids()[i]));
        }
        fs::write(preds.join(format!("preds_{f}.csv")), text).unwrap();
    }
    let glob = preds.join("preds_*.csv");
    let o = roiml(&[
        "compare",
        "--config",
        path.to_str().unwrap(),
        "--fractions",
        "0.4,0.8",
        "--external-preds",
        glob.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let crossovers: Value = serde_json::from_slice(&fs::read(out.join("crossovers.json")).unwrap()).unwrap();
    assert_eq!(crossovers[0]["a"], "RF");
    assert_eq!(crossovers[0]["b"], "external");
    assert!(out.join("roi_overlay.svg").exists());
}

#[test]
fn compare_with_one_technique_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), &small_config(dir.path()));
    let o = roiml(&["compare", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ingest_mines_the_sample_export() {
    let dir = tempfile::tempdir().unwrap();
    let config = repo_root().join("configs/table5-default.json");
    let out = dir.path().join("ingest");
    let o = roiml(&["ingest", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("requirements.json").exists());
}

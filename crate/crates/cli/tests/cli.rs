use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nnstne::clustering::EvalReport;
use nnstne::dataset::{write_ucr, Delimiter};
use nnstne::synthetic::{cbf_split, two_sinusoids};
use nnstne::training::{TrainedModel, MODEL_VERSION};
use serde_json::Value;

fn nnstne(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnstne"))
        .current_dir(dir)
        .args(args)
        .env_clear()
        .output()
        .expect("binary runs")
}

fn toy(dir: &Path) {
    write_ucr(
        &two_sinusoids(3, 32, 11),
        dir.join("toy.tsv"),
        Delimiter::TAB,
    )
    .unwrap();
}

fn train_toy(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "train",
        "--data",
        "toy.tsv",
        "--length",
        "8",
        "--count",
        "2",
        "--iters",
        "15",
        "--out",
        "model.json",
    ];
    args.extend_from_slice(extra);
    nnstne(dir, &args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn missing_data_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = nnstne(dir.path(), &["train", "--length", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn bad_flag_values_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    for extra in [
        &["--count", "zero"][..],
        &["--sigma", "-1"],
        &["--preprocess", "log"],
        &["--alpha", "0"],
    ] {
        assert_eq!(
            train_toy(dir.path(), extra).status.code(),
            Some(2),
            "{extra:?}"
        );
    }
    let out = nnstne(
        dir.path(),
        &["evaluate", "--data", "toy.tsv", "--features", "F"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn data_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        nnstne(
            dir.path(),
            &["train", "--data", "absent.tsv", "--length", "4"]
        )
        .status
        .code(),
        Some(3)
    );
    fs::write(dir.path().join("ragged.csv"), "1,0.1,0.2,0.3\n2,0.4,0.5\n").unwrap();
    assert_eq!(
        nnstne(
            dir.path(),
            &["train", "--data", "ragged.csv", "--length", "2"]
        )
        .status
        .code(),
        Some(3)
    );
    fs::write(dir.path().join("bad.json"), "{\"version\": 1}").unwrap();
    toy(dir.path());
    let out = nnstne(
        dir.path(),
        &[
            "evaluate", "--data", "toy.tsv", "--model", "bad.json", "--out", "r.json",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn diverging_training_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    let out = train_toy(
        dir.path(),
        &["--lr", "1e300", "--beta", "1e10", "--no-backoff"],
    );
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn train_evaluate_export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    toy(d);
    let out = train_toy(d, &["--quiet"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let text = fs::read_to_string(d.join("model.json")).unwrap();
    let json: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["version"], MODEL_VERSION);
    let model = TrainedModel::from_json(&text).unwrap();

    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(d.join("model.json.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "train");
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    for value in manifest["config"].as_object().unwrap().values() {
        assert_ne!(value, "auto");
    }
    assert!(manifest["config"]["sigma"].as_f64().unwrap() > 0.0);

    for kind in ["raw", "F", "q"] {
        let out = nnstne(
            d,
            &[
                "evaluate",
                "--data",
                "toy.tsv",
                "--model",
                "model.json",
                "--features",
                kind,
                "--out",
                "report.json",
            ],
        );
        assert!(out.status.success());
        let last = stdout(&out).lines().last().unwrap().to_owned();
        let ri: f64 = last.strip_prefix("RI=").unwrap().parse().unwrap();
        assert_eq!(last, format!("RI={ri:.4}"));
        let report: EvalReport =
            serde_json::from_str(&fs::read_to_string(d.join("report.json")).unwrap()).unwrap();
        assert_eq!(format!("{:.4}", report.rand_index), format!("{ri:.4}"));
        assert_eq!(report.n_samples, 6);
    }
    let out = nnstne(
        d,
        &[
            "evaluate",
            "--data",
            "toy.tsv",
            "--features",
            "raw",
            "--out",
            "raw.json",
        ],
    );
    assert!(out.status.success());
    assert!(d.join("raw.json.manifest.json").exists());

    assert!(nnstne(
        d,
        &[
            "export",
            "--model",
            "model.json",
            "--what",
            "loss",
            "--out",
            "loss.csv"
        ]
    )
    .status
    .success());
    let loss = fs::read_to_string(d.join("loss.csv")).unwrap();
    let mut lines = loss.lines();
    assert_eq!(lines.next(), Some("iteration,spectral,diversity,l1,total"));
    assert_eq!(lines.count(), model.loss_history.len());

    assert!(nnstne(
        d,
        &[
            "export",
            "--model",
            "model.json",
            "--what",
            "shapelets",
            "--out",
            "s.csv"
        ]
    )
    .status
    .success());
    let widths: Vec<usize> = fs::read_to_string(d.join("s.csv"))
        .unwrap()
        .lines()
        .map(|l| l.split(',').count())
        .collect();
    assert_eq!(widths, model.bank.effective_lengths());

    let out = nnstne(
        d,
        &[
            "export",
            "--model",
            "model.json",
            "--what",
            "features",
            "--out",
            "f.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(nnstne(
        d,
        &[
            "export",
            "--model",
            "model.json",
            "--what",
            "features",
            "--data",
            "toy.tsv",
            "--out",
            "f.csv"
        ]
    )
    .status
    .success());
    let rows: Vec<usize> = fs::read_to_string(d.join("f.csv"))
        .unwrap()
        .lines()
        .map(|l| l.split(',').count())
        .collect();
    assert_eq!(rows, vec![2; 6]);
}

#[test]
fn environment_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_nnstne"))
        .current_dir(dir.path())
        .args(["train", "--count", "2", "--quiet"])
        .env_clear()
        .env("NNSTNE_DATA", "toy.tsv")
        .env("NNSTNE_LENGTH", "6")
        .env("NNSTNE_ITERS", "3")
        .env("NNSTNE_OUT", "env.json")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let model =
        TrainedModel::from_json(&fs::read_to_string(dir.path().join("env.json")).unwrap()).unwrap();
    assert_eq!(
        (model.config.shapelet_length, model.config.max_iters),
        (6, 3)
    );
}

#[test]
fn auto_count_on_cbf_layout_is_thirteen() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = cbf_split(30, 900, 1);
    write_ucr(&train, dir.path().join("train.tsv"), Delimiter::TAB).unwrap();
    write_ucr(&test, dir.path().join("test.tsv"), Delimiter::TAB).unwrap();
    let out = nnstne(
        dir.path(),
        &[
            "train",
            "--data",
            "train.tsv",
            "--test",
            "test.tsv",
            "--length",
            "48",
            "--count",
            "auto",
            "--iters",
            "1",
            "--quiet",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("model.json.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["config"]["count"], 13);
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);
}

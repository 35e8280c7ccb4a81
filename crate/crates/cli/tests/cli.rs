use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use socialsig_core::eval::EvalReport;
use socialsig_core::features::ZoneConfig;
use socialsig_core::metrics::{read_channel_set, Channel};
use socialsig_core::models::ExportedModel;

fn socialsig(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_socialsig")).current_dir(dir).env_remove("SOCIALSIG_OUT_DIR").args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = socialsig(dir, args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn small_corpus(dir: &Path, name: &str, sessions: usize, separability: &str) {
    let n = sessions.to_string();
    ok(dir, &["synth", "--out", name, "--sessions", &n, "--seed", "4", "--separability", separability, "--duration-mean", "25", "--duration-sd", "4", "--duration-min", "20", "--duration-max", "30"]);
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

fn table_rows(md: &str) -> usize {
    md.lines().count() - 2
}

#[test]
fn default_synth_has_46_sessions_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    ok(tmp.path(), &["synth", "--out", "a"]);
    ok(tmp.path(), &["synth", "--out", "b"]);
    let a = files(&tmp.path().join("a/landmarks"));
    assert_eq!(a.len(), 46);
    assert_eq!(files(&tmp.path().join("a/faces")).len(), 46);
    for name in ["questionnaire.csv", "markers.csv", "calibration.json", "manifest.json", "landmarks/s017.csv", "faces/s046.csv"] {
        assert!(fs::read(tmp.path().join("a").join(name)).unwrap() == fs::read(tmp.path().join("b").join(name)).unwrap(), "{name}");
    }
}

#[test]
fn full_pipeline_and_reruns() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    small_corpus(d, "corpus", 8, "1");
    ok(d, &["extract", "--corpus", "corpus", "--out", "run"]);
    let channels = files(&d.join("run/channels"));
    assert_eq!(channels.len(), 8);
    let set = read_channel_set(std::io::BufReader::new(fs::File::open(&channels[0]).unwrap())).unwrap();
    assert_eq!(set.channels.len(), 23);
    assert_eq!(fs::read_to_string(d.join("run/extract_errors.log")).unwrap(), "");

    ok(d, &["features", "--out", "run"]);
    let header_cols = |e: &str| {
        let text = fs::read_to_string(d.join(format!("run/features/{e}.csv"))).unwrap();
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap().to_string();
        header.split(',').count() - 1
    };
    assert_eq!(header_cols("canonical22"), 506);
    assert_eq!(header_cols("spectral_stat"), 1794);
    assert_eq!(header_cols("zones"), ZoneConfig::default().feature_count());

    ok(d, &["evaluate", "--out", "run", "--questionnaire", "corpus/questionnaire.csv"]);
    let md = fs::read_to_string(d.join("run/report/report.md")).unwrap();
    assert_eq!(table_rows(&md), 12);
    let report = EvalReport::from_json(&fs::read_to_string(d.join("run/report/report.json")).unwrap()).unwrap();
    assert_eq!(report.rows.len(), 12);
    assert_eq!(report.sessions, 8);

    // Same inputs, another worker count: identical bytes.
    let before: Vec<Vec<u8>> = ["report/report.json", "report/report.md", "manifest.json"].iter().map(|f| fs::read(d.join("run").join(f)).unwrap()).collect();
    ok(d, &["--workers", "1", "evaluate", "--out", "run", "--questionnaire", "corpus/questionnaire.csv"]);
    let after: Vec<Vec<u8>> = ["report/report.json", "report/report.md", "manifest.json"].iter().map(|f| fs::read(d.join("run").join(f)).unwrap()).collect();
    assert!(before == after);

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("run/manifest.json")).unwrap()).unwrap();
    for stage in ["extract", "features", "evaluate"] {
        assert_eq!(manifest["stages"][stage]["config_hash"].as_str().unwrap().len(), 64, "{stage}");
        assert_eq!(manifest["stages"][stage]["stage_version"], 1);
    }
    assert_eq!(manifest["stages"]["evaluate"]["seed"], 0);

    // One engine, one model: one row. Two such reports merge.
    ok(d, &["evaluate", "--out", "one", "--features", "run/features/zones.csv", "--model", "gaussian-nb", "--questionnaire", "corpus/questionnaire.csv"]);
    assert_eq!(table_rows(&fs::read_to_string(d.join("one/report/report.md")).unwrap()), 1);
    ok(d, &["evaluate", "--out", "two", "--features", "run/features/canonical22.csv", "--model", "linear-svm", "--questionnaire", "corpus/questionnaire.csv"]);
    let out = ok(d, &["report", "--out", "merged", "--input", "one/report/report.json,two/report/report.json", "--questionnaire", "corpus/questionnaire.csv"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("| canonical22 | Support Vector Machine |") && stdout.contains("| zones | Naive Bayes |"), "{stdout}");
    assert!(stdout.contains("Cronbach's alpha"));
    let merged = fs::read_to_string(d.join("merged/report/report.md")).unwrap();
    assert_eq!(table_rows(&merged), 2);
    assert!(merged.find("canonical22").unwrap() < merged.find("zones").unwrap());
    assert_eq!(socialsig(d, &["report", "--out", "merged", "--input", "one/report/report.json,one/report/report.json"]).status.code(), Some(2));

    ok(d, &["select", "--out", "run", "--engine", "canonical22", "--model", "logistic-regression,random-forest", "--k", "5", "--questionnaire", "corpus/questionnaire.csv"]);
    for m in ["logistic_regression", "random_forest"] {
        let model = ExportedModel::from_json(&fs::read_to_string(d.join(format!("run/models/canonical22_{m}.json"))).unwrap()).unwrap();
        assert_eq!(model.kind.key(), m);
        assert_eq!(model.selected_features.len(), 5);
        assert!(model.parameters.is_some() && model.hyperparameters.is_some());
    }
    let sel = fs::read_to_string(d.join("run/models/canonical22_selection.csv")).unwrap();
    assert_eq!(sel.lines().count(), 507);
    assert_eq!(sel.lines().filter(|l| !l.ends_with(',')).count(), 6);
}

#[test]
fn missing_calibration_is_fatal_before_processing() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    small_corpus(d, "corpus", 3, "1");
    fs::remove_file(d.join("corpus/calibration.json")).unwrap();
    let out = socialsig(d, &["extract", "--corpus", "corpus", "--out", "run"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!d.join("run/channels").exists());
}

#[test]
fn corrupt_session_is_isolated() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    small_corpus(d, "corpus", 4, "1");
    let bad = d.join("corpus/landmarks/s002.csv");
    let text = fs::read_to_string(&bad).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let i = lines.iter().position(|l| !l.starts_with('#')).unwrap() + 3;
    // Drop the last landmark and the optional iris field: 32 landmarks left.
    let fields: Vec<&str> = lines[i].split(',').collect();
    lines[i] = fields[..fields.len() - 5].join(",");
    fs::write(&bad, lines.join("\n") + "\n").unwrap();

    let out = socialsig(d, &["extract", "--corpus", "corpus", "--out", "run"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    let written: Vec<String> = files(&d.join("run/channels")).iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(written, ["s001.csv", "s003.csv", "s004.csv"]);
    let log = fs::read_to_string(d.join("run/extract_errors.log")).unwrap();
    assert_eq!(log.lines().count(), 1);
    assert!(log.starts_with("s002\t"), "{log}");
}

#[test]
fn separability_changes_only_patterned_channels() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    small_corpus(d, "c0", 3, "0");
    small_corpus(d, "c1", 3, "1");
    ok(d, &["extract", "--corpus", "c0", "--out", "r0"]);
    ok(d, &["extract", "--corpus", "c1", "--out", "r1"]);
    let patterned = [Channel::HeadHeading, Channel::HeadSagittal, Channel::Distance, Channel::FaceFear, Channel::FaceNeutral];
    let mut changed = false;
    for (a, b) in files(&d.join("r0/channels")).iter().zip(files(&d.join("r1/channels"))) {
        let read = |p: &Path| read_channel_set(std::io::BufReader::new(fs::File::open(p).unwrap())).unwrap();
        let (sa, sb) = (read(a), read(&b));
        for (ca, cb) in sa.channels.iter().zip(&sb.channels) {
            let diff = ca.values.iter().zip(&cb.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            if patterned.contains(&ca.channel) {
                changed |= diff > 1e-3;
            } else {
                assert!(diff <= 1e-4, "{:?} differs by {diff}", ca.channel);
            }
        }
    }
    assert!(changed);
}

#[test]
fn out_dir_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_socialsig"))
        .current_dir(tmp.path())
        .env("SOCIALSIG_OUT_DIR", "from_env")
        .args(["synth", "--sessions", "2", "--duration-mean", "5", "--duration-sd", "1", "--duration-min", "3", "--duration-max", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("from_env/questionnaire.csv").exists());
}

#[test]
fn usage_errors_are_fatal() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(socialsig(tmp.path(), &["evaluate"]).status.code(), Some(2));
    assert_eq!(socialsig(tmp.path(), &["synth", "--duration-min", "50", "--duration-max", "40"]).status.code(), Some(2));
    assert_eq!(socialsig(tmp.path(), &["--workers", "0", "synth"]).status.code(), Some(2));
}

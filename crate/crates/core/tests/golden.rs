//! Byte-level snapshots of the on-disk formats written for a tiny synthetic
//! corpus. Set `UPDATE_GOLDEN=1` to rewrite them after an intended change.

use std::fs;
use std::path::{Path, PathBuf};

use socialsig_core::synth::{write_corpus, SynthConfig};

const FILES: [&str; 7] = [
    "landmarks/s001.csv",
    "faces/s001.csv",
    "questionnaire.csv",
    "markers.csv",
    "calibration.json",
    "synth_config.json",
    "sessions.csv",
];

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/golden")
}

fn tiny() -> SynthConfig {
    SynthConfig { sessions: 2, duration_mean_s: 1.0, duration_sd_s: 0.1, duration_min_s: 0.5, duration_max_s: 1.5, lead_s: 0.5, seed: 3, ..Default::default() }
}

#[test]
fn corpus_files_match_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    write_corpus(&tiny(), tmp.path()).unwrap();
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for name in FILES {
        let got = fs::read(tmp.path().join(name)).unwrap();
        let path = golden_dir().join(name);
        if update {
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(&path, &got).unwrap();
            continue;
        }
        let want = fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(got == want, "{name} differs from its snapshot");
    }
}

use std::collections::HashMap;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use socialsig_core::eval::{
    average_items, cronbach_alpha, evaluate_model, fit_all, parse_questionnaire, render_report, EvalReport, LabeledDataset, LoocvConfig, QuestionnaireResponse, SelectionScope,
};
use socialsig_core::features::{build_feature_matrix, read_feature_matrix, write_feature_matrix, Engine, EngineSpec, FeatureMatrix, ZoneConfig};
use socialsig_core::ingest::{parse_landmark_stream, CalibrationSet};
use socialsig_core::metrics::{parse_face_stream, read_channel_set, write_channel_set, ChannelSet};
use socialsig_core::models::{anova_f, ModelKind, ModelSpec};
use socialsig_core::pipeline::{extract_session, ExtractConfig};
use socialsig_core::preprocess::{parse_markers, PhaseMarkers};
use socialsig_core::synth::{write_corpus, SynthConfig};
use socialsig_core::{Error, Result};

use crate::manifest;

pub const CHANNELS_DIR: &str = "channels";
pub const FEATURES_DIR: &str = "features";
pub const MODELS_DIR: &str = "models";
pub const REPORT_DIR: &str = "report";
pub const EXTRACT_LOG: &str = "extract_errors.log";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Some sessions failed; the rest were written.
    Partial,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    f(&mut w).and_then(|()| w.flush()).map_err(|e| Error::io(path, e))
}

/// `*.csv` files in `dir`, sorted by name.
fn csv_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let p = entry.map_err(|e| Error::io(dir, e))?.path();
        if p.extension().is_some_and(|x| x == "csv") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn load_questionnaire(path: &Path) -> Result<Vec<QuestionnaireResponse>> {
    parse_questionnaire(open(path)?)
}

pub fn synth(cfg: &SynthConfig, out: &Path) -> Result<Outcome> {
    create_dir(out)?;
    write_corpus(cfg, out)?;
    manifest::record(out, "synth", 1, Some(cfg.seed), cfg, vec!["landmarks".into(), "faces".into(), "questionnaire.csv".into(), "markers.csv".into(), "calibration.json".into()])?;
    Ok(Outcome::Success)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtractArgs {
    pub landmarks: PathBuf,
    pub faces: PathBuf,
    pub calibration: PathBuf,
    pub markers: Option<PathBuf>,
    pub config: ExtractConfig,
}

fn extract_one(args: &ExtractArgs, cal: &CalibrationSet, markers: Option<&HashMap<String, PhaseMarkers>>, path: &Path, out: &Path) -> Result<()> {
    let id = stem(path);
    let landmarks = parse_landmark_stream(open(path)?)?;
    let faces = parse_face_stream(open(&args.faces.join(format!("{id}.csv")))?)?;
    let m = match markers {
        Some(map) => Some(*map.get(&id).ok_or_else(|| Error::invalid(format!("no phase markers for {id}")))?),
        None => None,
    };
    let set = extract_session(landmarks, &faces, cal, m, &args.config)?;
    write_with(&out.join(format!("{}.csv", set.session_id)), |w| write_channel_set(w, &set))
}

/// One channel file per session. A failing session is logged and skipped;
/// a bad calibration or marker file stops the run before any session.
pub fn extract(args: &ExtractArgs, out: &Path) -> Result<Outcome> {
    let cal = CalibrationSet::load(&args.calibration)?;
    let markers = args.markers.as_deref().map(|p| parse_markers(open(p)?)).transpose()?;
    let files = csv_files(&args.landmarks)?;
    if files.is_empty() {
        return Err(Error::invalid(format!("no landmark files in {}", args.landmarks.display())));
    }
    let dir = out.join(CHANNELS_DIR);
    create_dir(&dir)?;
    let results: Vec<(String, Result<()>)> = files.par_iter().map(|p| (stem(p), extract_one(args, &cal, markers.as_ref(), p, &dir))).collect();
    let failed: Vec<(&String, &Error)> = results.iter().filter_map(|(id, r)| r.as_ref().err().map(|e| (id, e))).collect();
    write_with(&out.join(EXTRACT_LOG), |w| {
        for (id, e) in &failed {
            writeln!(w, "{id}\t{e}")?;
        }
        Ok(())
    })?;
    for (id, e) in &failed {
        eprintln!("extract: {id}: {e}");
    }
    if failed.len() == files.len() {
        return Err(Error::invalid(format!("all {} sessions failed; see {}", files.len(), out.join(EXTRACT_LOG).display())));
    }
    let written: Vec<String> = results.iter().filter(|(_, r)| r.is_ok()).map(|(id, _)| format!("{CHANNELS_DIR}/{id}.csv")).collect();
    manifest::record(out, "extract", 1, None, args, written)?;
    Ok(if failed.is_empty() { Outcome::Success } else { Outcome::Partial })
}

pub fn load_channel_sets(dir: &Path) -> Result<Vec<ChannelSet>> {
    let files = csv_files(dir)?;
    if files.is_empty() {
        return Err(Error::invalid(format!("no channel files in {}", dir.display())));
    }
    files.par_iter().map(|p| read_channel_set(open(p)?).map_err(|e| Error::Schema(format!("{}: {e}", p.display())))).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct FeaturesArgs {
    pub channels: PathBuf,
    pub engines: Vec<Engine>,
    pub zone_config: Option<PathBuf>,
}

pub fn matrix_path(out: &Path, engine: Engine) -> PathBuf {
    out.join(FEATURES_DIR).join(format!("{engine}.csv"))
}

pub fn features(args: &FeaturesArgs, out: &Path) -> Result<Outcome> {
    let zones = match &args.zone_config {
        Some(p) => ZoneConfig::load(p)?,
        None => ZoneConfig::default(),
    };
    let sets = load_channel_sets(&args.channels)?;
    create_dir(&out.join(FEATURES_DIR))?;
    let mut outputs = Vec::new();
    for &engine in &args.engines {
        let spec = match engine {
            Engine::SpectralStat => EngineSpec::SpectralStat,
            Engine::Canonical22 => EngineSpec::Canonical22,
            Engine::Zones => {
                let resolved = zones.resolve(&sets)?;
                let p = out.join(FEATURES_DIR).join("zones_resolved.json");
                let text = serde_json::to_string_pretty(&resolved)? + "\n";
                fs::write(&p, text).map_err(|e| Error::io(&p, e))?;
                outputs.push(format!("{FEATURES_DIR}/zones_resolved.json"));
                EngineSpec::Zones(zones.clone())
            }
        };
        let m = build_feature_matrix(&sets, &spec)?;
        write_with(&matrix_path(out, engine), |w| write_feature_matrix(w, &m))?;
        outputs.push(format!("{FEATURES_DIR}/{engine}.csv"));
    }
    manifest::record(out, "features", 1, None, args, outputs)?;
    Ok(Outcome::Success)
}

pub fn load_matrix(path: &Path) -> Result<FeatureMatrix> {
    read_feature_matrix(open(path)?).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelArgs {
    pub features: Vec<PathBuf>,
    pub questionnaire: PathBuf,
    pub models: Vec<ModelKind>,
    pub k: usize,
    pub seed: u64,
    pub scope: SelectionScope,
}

impl ModelArgs {
    fn loocv_config(&self) -> LoocvConfig {
        LoocvConfig { k: self.k, scope: self.scope, ..Default::default() }
    }

    fn datasets(&self) -> Result<Vec<LabeledDataset>> {
        let responses = load_questionnaire(&self.questionnaire)?;
        self.features.iter().map(|p| LabeledDataset::from_matrix(&load_matrix(p)?, &responses)).collect()
    }
}

fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "nan".into()
    }
}

/// Fits selection and each model on every row. Writes the ANOVA table for
/// all candidate features and one model file per model.
pub fn select(args: &ModelArgs, out: &Path) -> Result<Outcome> {
    let dir = out.join(MODELS_DIR);
    create_dir(&dir)?;
    let cfg = args.loocv_config();
    let mut outputs = Vec::new();
    for ds in args.datasets()? {
        let mut fits = Vec::new();
        for &kind in &args.models {
            let fit = fit_all(&ds, &ModelSpec::default_for(kind, args.seed), &cfg)?;
            let name = format!("{}_{kind}.json", ds.engine);
            let p = dir.join(&name);
            fs::write(&p, fit.export(kind).to_json() + "\n").map_err(|e| Error::io(&p, e))?;
            outputs.push(format!("{MODELS_DIR}/{name}"));
            fits.push(fit);
        }
        // Selection does not depend on the model, so the first fit speaks for all.
        let chosen = fits.first().map(|f| f.names.clone()).unwrap_or_default();
        let name = format!("{}_selection.csv", ds.engine);
        write_with(&dir.join(&name), |w| {
            writeln!(w, "feature,f_value,p_value,rank")?;
            for (j, feature) in ds.names.iter().enumerate() {
                let col: Vec<f64> = ds.rows.iter().map(|r| r[j]).collect();
                let (f, p) = anova_f(&col, &ds.labels).unwrap_or((f64::NAN, f64::NAN));
                let rank = chosen.iter().position(|n| n == feature).map(|r| (r + 1).to_string()).unwrap_or_default();
                writeln!(w, "{feature},{},{},{rank}", num(f), num(p))?;
            }
            Ok(())
        })?;
        outputs.push(format!("{MODELS_DIR}/{name}"));
    }
    manifest::record(out, "select", 1, Some(args.seed), args, outputs)?;
    Ok(Outcome::Success)
}

pub fn evaluate(args: &ModelArgs, out: &Path) -> Result<Outcome> {
    let cfg = args.loocv_config();
    let datasets = args.datasets()?;
    let Some(first) = datasets.first() else {
        return Err(Error::invalid("no feature matrices given"));
    };
    let mut report = EvalReport {
        sessions: first.len(),
        class_counts: first.class_counts(),
        threshold: first.threshold,
        k: args.k,
        scope: args.scope,
        seed: args.seed,
        rows: Vec::new(),
    };
    for ds in &datasets {
        if ds.session_ids != first.session_ids {
            return Err(Error::Schema(format!("{} matrix covers different sessions than {}", ds.engine, first.engine)));
        }
        for &kind in &args.models {
            report.rows.push(evaluate_model(ds, &ModelSpec::default_for(kind, args.seed), &cfg)?);
        }
    }
    report.sort_rows();
    for row in &report.rows {
        if !row.degenerate_folds.is_empty() {
            eprintln!("evaluate: {} {}: single-class training folds for {}", row.engine, row.model, row.degenerate_folds.join(", "));
        }
    }
    let dir = out.join(REPORT_DIR);
    create_dir(&dir)?;
    write_report_files(&report, &dir)?;
    manifest::record(out, "evaluate", 1, Some(args.seed), args, vec![format!("{REPORT_DIR}/report.json"), format!("{REPORT_DIR}/report.md")])?;
    Ok(Outcome::Success)
}

fn write_report_files(report: &EvalReport, dir: &Path) -> Result<()> {
    let json = dir.join("report.json");
    fs::write(&json, report.to_json() + "\n").map_err(|e| Error::io(&json, e))?;
    let md = dir.join("report.md");
    fs::write(&md, render_report(report)).map_err(|e| Error::io(&md, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportArgs {
    pub inputs: Vec<PathBuf>,
    pub questionnaire: Option<PathBuf>,
}

/// Merges report files into one table (rows in engine, model order) and
/// prints it. Reports must describe the same labelled sessions.
pub fn report(args: &ReportArgs, out: &Path) -> Result<Outcome> {
    let mut merged: Option<EvalReport> = None;
    for p in &args.inputs {
        let text = fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        let r = EvalReport::from_json(&text)?;
        match &mut merged {
            None => merged = Some(r),
            Some(m) => {
                if (m.sessions, m.class_counts) != (r.sessions, r.class_counts) || m.threshold.to_bits() != r.threshold.to_bits() {
                    return Err(Error::Schema(format!("{} was computed on different labels", p.display())));
                }
                for row in r.rows {
                    if m.rows.iter().any(|x| (x.engine, x.model) == (row.engine, row.model)) {
                        return Err(Error::Schema(format!("{} {} appears in more than one report", row.engine, row.model)));
                    }
                    m.rows.push(row);
                }
            }
        }
    }
    let mut merged = merged.ok_or_else(|| Error::invalid("no report files given"))?;
    merged.sort_rows();
    let dir = out.join(REPORT_DIR);
    create_dir(&dir)?;
    write_report_files(&merged, &dir)?;
    print!("{}", render_report(&merged));
    println!();
    println!("sessions {} (low {}, medium-high {}), threshold {:.3}", merged.sessions, merged.class_counts[0], merged.class_counts[1], merged.threshold);
    if let Some(q) = &args.questionnaire {
        let responses = load_questionnaire(q)?;
        let items: Vec<Vec<f64>> = responses.iter().map(|r| r.items.iter().map(|&v| f64::from(v)).collect()).collect();
        let scores: Vec<f64> = responses.iter().map(|r| average_items(&r.items)).collect();
        let mean = scores.iter().sum::<f64>() / scores.len().max(1) as f64;
        println!("questionnaire: {} responses, mean score {mean:.2}, Cronbach's alpha {:.2}", responses.len(), cronbach_alpha(&items)?);
    }
    manifest::record(out, "report", 1, None, args, vec![format!("{REPORT_DIR}/report.json"), format!("{REPORT_DIR}/report.md")])?;
    Ok(Outcome::Success)
}

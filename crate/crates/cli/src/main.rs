//! `socialsig`: raw pose/face streams to satisfaction classification reports.

mod commands;
mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use socialsig_core::eval::{SelectionScope, DEFAULT_K};
use socialsig_core::features::Engine;
use socialsig_core::models::ModelKind;
use socialsig_core::pipeline::ExtractConfig;
use socialsig_core::synth::SynthConfig;

use commands::{ExtractArgs, FeaturesArgs, ModelArgs, Outcome, ReportArgs};

#[derive(Parser)]
#[command(name = "socialsig", version, about = "Social-signal features and user-satisfaction classification")]
struct Cli {
    /// Worker threads for session- and fold-level parallelism (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output directory. Stages write into subdirectories of it and share
    /// one manifest.json.
    #[arg(long, global = true, env = "SOCIALSIG_OUT_DIR", default_value = "socialsig-out")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Landmark and face streams to per-session channel files.
    Extract(ExtractCmd),
    /// Channel files to feature matrices.
    Features(FeaturesCmd),
    /// Fit selection and models on all sessions and export them.
    Select(ModelCmd),
    /// Leave-one-out evaluation of every engine and model.
    Evaluate(ModelCmd),
    /// Generate a synthetic corpus.
    Synth(SynthCmd),
    /// Merge and print evaluation reports.
    Report(ReportCmd),
}

#[derive(Args)]
struct ExtractCmd {
    /// Corpus root; supplies defaults for the paths below.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Directory of per-session landmark files (<id>.csv).
    #[arg(long)]
    landmarks: Option<PathBuf>,
    /// Directory of per-session face files (<id>.csv).
    #[arg(long)]
    faces: Option<PathBuf>,
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Phase marker file; without it sessions are not trimmed.
    #[arg(long)]
    markers: Option<PathBuf>,
    #[arg(long)]
    smooth_window: Option<usize>,
    #[arg(long)]
    min_visibility: Option<f64>,
    #[arg(long)]
    max_distance: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    SpectralStat,
    Canonical22,
    Zones,
    All,
}

fn engines(args: &[EngineArg]) -> Vec<Engine> {
    let mut out = Vec::new();
    for a in args {
        let picked: &[Engine] = match a {
            EngineArg::SpectralStat => &[Engine::SpectralStat],
            EngineArg::Canonical22 => &[Engine::Canonical22],
            EngineArg::Zones => &[Engine::Zones],
            EngineArg::All => &Engine::ALL,
        };
        for e in picked {
            if !out.contains(e) {
                out.push(*e);
            }
        }
    }
    out.sort();
    out
}

#[derive(Args)]
struct FeaturesCmd {
    /// Channel files (default: <out>/channels).
    #[arg(long)]
    channels: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    engine: Vec<EngineArg>,
    /// Zone configuration JSON for the zones engine.
    #[arg(long)]
    zone_config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    LogisticRegression,
    LinearSvm,
    GaussianNb,
    RandomForest,
    All,
}

fn models(args: &[ModelArg]) -> Vec<ModelKind> {
    let mut out: Vec<ModelKind> = Vec::new();
    for a in args {
        let picked: &[ModelKind] = match a {
            ModelArg::LogisticRegression => &[ModelKind::LogisticRegression],
            ModelArg::LinearSvm => &[ModelKind::LinearSvm],
            ModelArg::GaussianNb => &[ModelKind::GaussianNb],
            ModelArg::RandomForest => &[ModelKind::RandomForest],
            ModelArg::All => &ModelKind::ALL,
        };
        for m in picked {
            if !out.contains(m) {
                out.push(*m);
            }
        }
    }
    out.sort();
    out
}

#[derive(Clone, Copy, ValueEnum)]
enum ScopeArg {
    InFold,
    /// Select once on all rows before the folds. Leaks the held-out row into
    /// selection; only for comparison.
    Global,
}

#[derive(Args)]
struct ModelCmd {
    /// Feature matrix files (default: <out>/features/<engine>.csv for each --engine).
    #[arg(long, value_delimiter = ',')]
    features: Vec<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    engine: Vec<EngineArg>,
    #[arg(long)]
    questionnaire: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    model: Vec<ModelArg>,
    /// Features kept by ANOVA selection.
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "in-fold")]
    scope: ScopeArg,
}

impl ModelCmd {
    fn resolve(&self, out: &Path) -> ModelArgs {
        let features = if self.features.is_empty() {
            engines(&self.engine).into_iter().map(|e| commands::matrix_path(out, e)).collect()
        } else {
            self.features.clone()
        };
        ModelArgs {
            features,
            questionnaire: self.questionnaire.clone(),
            models: models(&self.model),
            k: self.k,
            seed: self.seed,
            scope: match self.scope {
                ScopeArg::InFold => SelectionScope::InFold,
                ScopeArg::Global => SelectionScope::Global,
            },
        }
    }
}

#[derive(Args)]
struct SynthCmd {
    #[arg(long, default_value_t = SynthConfig::default().sessions)]
    sessions: usize,
    #[arg(long, default_value_t = SynthConfig::default().low_fraction)]
    low_fraction: f64,
    /// Class separability in [0, 1].
    #[arg(long, default_value_t = SynthConfig::default().separability)]
    separability: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = SynthConfig::default().cameras)]
    cameras: usize,
    #[arg(long, default_value_t = SynthConfig::default().duration_mean_s)]
    duration_mean: f64,
    #[arg(long, default_value_t = SynthConfig::default().duration_sd_s)]
    duration_sd: f64,
    #[arg(long, default_value_t = SynthConfig::default().duration_min_s)]
    duration_min: f64,
    #[arg(long, default_value_t = SynthConfig::default().duration_max_s)]
    duration_max: f64,
}

#[derive(Args)]
struct ReportCmd {
    /// Report JSON files (default: <out>/report/report.json).
    #[arg(long, value_delimiter = ',')]
    input: Vec<PathBuf>,
    /// Also summarise the questionnaire (item consistency, mean score).
    #[arg(long)]
    questionnaire: Option<PathBuf>,
}

fn run(cli: Cli) -> socialsig_core::Result<Outcome> {
    let out = cli.out;
    match cli.command {
        Command::Synth(c) => {
            let cfg = SynthConfig {
                sessions: c.sessions,
                low_fraction: c.low_fraction,
                separability: c.separability,
                seed: c.seed,
                cameras: c.cameras,
                duration_mean_s: c.duration_mean,
                duration_sd_s: c.duration_sd,
                duration_min_s: c.duration_min,
                duration_max_s: c.duration_max,
                ..Default::default()
            };
            commands::synth(&cfg, &out)
        }
        Command::Extract(c) => {
            let root = |name: &str| c.corpus.as_ref().map(|r| r.join(name));
            let need = |p: Option<PathBuf>, flag: &str| p.ok_or_else(|| socialsig_core::Error::invalid(format!("--{flag} (or --corpus) is required")));
            let mut config = ExtractConfig::default();
            if let Some(w) = c.smooth_window {
                config.preprocess.smooth_window = w;
            }
            if let Some(v) = c.min_visibility {
                config.fusion.min_visibility = v;
            }
            if let Some(d) = c.max_distance {
                config.fusion.max_distance = d;
            }
            let markers = c.markers.or_else(|| root("markers.csv").filter(|p| p.exists()));
            let args = ExtractArgs {
                landmarks: need(c.landmarks.or_else(|| root("landmarks")), "landmarks")?,
                faces: need(c.faces.or_else(|| root("faces")), "faces")?,
                calibration: need(c.calibration.or_else(|| root("calibration.json")), "calibration")?,
                markers,
                config,
            };
            commands::extract(&args, &out)
        }
        Command::Features(c) => {
            let args = FeaturesArgs { channels: c.channels.unwrap_or_else(|| out.join(commands::CHANNELS_DIR)), engines: engines(&c.engine), zone_config: c.zone_config };
            commands::features(&args, &out)
        }
        Command::Select(c) => commands::select(&c.resolve(&out), &out),
        Command::Evaluate(c) => commands::evaluate(&c.resolve(&out), &out),
        Command::Report(c) => {
            let inputs = if c.input.is_empty() { vec![out.join(commands::REPORT_DIR).join("report.json")] } else { c.input };
            commands::report(&ReportArgs { inputs, questionnaire: c.questionnaire }, &out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

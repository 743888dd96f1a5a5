use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde_json::json;

use avq::error::{CliError, CliResult};
use avq::fsutil::{ensure_dir, write_bytes};
use avq::manifest::load_manifest;
use avq::model_file::{config_json, model_from_json, model_to_json};
use avq::pipeline::{self, extract_pair, global_set, thread_pool};
use avq::report::{aggregate_line, write_report_files};
use avq::settings::{ConfigFile, Overrides, Settings};
use avq::tables;
use avq_core::cv::FoldGrouping;
use avq_core::distortion::synth::SynthConfig;
use avq_core::fusion::AudiovisualFeatures;
use avq_core::scoring::{predict_quality, score_features, QualityScore};

/// No-reference audio-visual quality estimation.
#[derive(Debug, Parser)]
#[command(name = "avq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute visual, audio and merged feature CSVs.
    Extract(ExtractArgs),
    /// Train a model on every clip of a manifest.
    Train(TrainArgs),
    /// Score one clip with a trained model.
    Predict(PredictArgs),
    /// Run k-fold cross-validation and write the report.
    Evaluate(EvaluateArgs),
    /// Generate a degraded synthetic corpus with pseudo opinion scores.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
struct Common {
    /// key = value settings file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Maximum worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct TrainingFlags {
    /// Epochs for each pretraining stage (both autoencoders and the softmax head).
    #[arg(long)]
    pretrain_epochs: Option<usize>,
    /// Epochs for end-to-end fine-tuning.
    #[arg(long)]
    finetune_epochs: Option<usize>,
    #[arg(long)]
    learning_rate: Option<f64>,
    #[arg(long)]
    batch_size: Option<usize>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    #[command(flatten)]
    common: Common,
    /// Extract every clip of a manifest (also writes the global training set).
    #[arg(long, conflicts_with_all = ["video", "audio"])]
    manifest: Option<PathBuf>,
    #[arg(long, requires = "audio")]
    video: Option<PathBuf>,
    #[arg(long, requires = "video")]
    audio: Option<PathBuf>,
    /// Clip id used for output names in single-clip mode.
    #[arg(long, default_value = "clip")]
    id: String,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    training: TrainingFlags,
    #[arg(long)]
    manifest: PathBuf,
    /// Output model file.
    #[arg(long)]
    model: PathBuf,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, requires = "audio", required_unless_present = "features")]
    video: Option<PathBuf>,
    #[arg(long, requires = "video")]
    audio: Option<PathBuf>,
    /// Merged feature CSV written by `extract` instead of media files.
    #[arg(long, conflicts_with_all = ["video", "audio"])]
    features: Option<PathBuf>,
    /// Print a JSON object instead of the bare score.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value = "clip")]
    id: String,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    training: TrainingFlags,
    #[arg(long)]
    manifest: PathBuf,
    /// Number of folds.
    #[arg(long)]
    k: Option<usize>,
    /// Fold assignment: `clip` or `source` (keeps variants of one source together).
    #[arg(long)]
    grouping: Option<FoldGrouping>,
    /// Output directory for report.csv, report.json and predictions.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 160)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
}

fn settings(common: &Common, training: Option<&TrainingFlags>, k: Option<usize>, grouping: Option<FoldGrouping>) -> CliResult<Settings> {
    let file = common.config.as_deref().map(ConfigFile::load).transpose()?;
    let mut o = Overrides {
        seed: common.seed,
        jobs: common.jobs,
        k,
        grouping,
        ..Default::default()
    };
    if let Some(t) = training {
        o.pretrain_epochs = t.pretrain_epochs;
        o.finetune_epochs = t.finetune_epochs;
        o.learning_rate = t.learning_rate;
        o.batch_size = t.batch_size;
    }
    let s = Settings::resolve(&o, file.as_ref())?;
    info!("settings: {s:?}");
    Ok(s)
}

fn run_extract(a: ExtractArgs) -> CliResult<()> {
    let s = settings(&a.common, None, None, None)?;
    ensure_dir(&a.out)?;
    let write_clip = |f: &pipeline::ClipFeatures| -> CliResult<()> {
        tables::write_visual(&a.out.join(format!("{}.visual.csv", f.id)), &f.visual)?;
        tables::write_audio(&a.out.join(format!("{}.audio.csv", f.id)), &f.audio)?;
        tables::write_fused(&a.out.join(format!("{}.features.csv", f.id)), &tables::fused_row_labels(&f.audio), &f.fused)
    };
    match (&a.manifest, &a.video, &a.audio) {
        (Some(m), _, _) => {
            let manifest = load_manifest(m)?;
            let features = pipeline::extract_manifest(&manifest, &thread_pool(s.jobs)?)?;
            features.iter().try_for_each(write_clip)?;
            let set = global_set(&manifest, &features)?;
            if let Some(first) = features.first() {
                tables::write_global(&a.out, &tables::fused_row_labels(&first.audio), &set)?;
            }
        }
        (None, Some(v), Some(au)) => write_clip(&extract_pair(&a.id, v, au)?)?,
        _ => return Err(CliError::Config("extract needs --manifest or both --video and --audio".into())),
    }
    Ok(())
}

fn run_train(a: TrainArgs) -> CliResult<()> {
    let s = settings(&a.common, Some(&a.training), None, None)?;
    let manifest = load_manifest(&a.manifest)?;
    let (model, report) = pipeline::train(&manifest, &s)?;
    info!(
        "cross-entropy before fine-tuning {:.5}, after {:.5}; first-stage mean activation {:.4}",
        report.stacked_cross_entropy, report.finetuned_cross_entropy, report.autoencoder1_mean_activation
    );
    write_bytes(&a.model, model_to_json(&model).as_bytes())
}

fn load_features(path: &Path) -> CliResult<AudiovisualFeatures> {
    let (_, m) = tables::read_matrix_file(path)?;
    Ok(AudiovisualFeatures::new(m)?)
}

fn run_predict(a: PredictArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&a.model).map_err(|e| CliError::io(&a.model, e))?;
    let model = model_from_json(&text)?;
    let score: QualityScore = match (&a.features, &a.video, &a.audio) {
        (Some(f), _, _) => score_features(&model, &load_features(f)?)?,
        (None, Some(v), Some(au)) => {
            predict_quality(&model, &pipeline::load_video(v)?, &pipeline::load_audio(au)?).map_err(|e| CliError::in_clip(&a.id, e))?
        }
        _ => return Err(CliError::Config("predict needs --features or both --video and --audio".into())),
    };
    if a.json {
        let (min, max, mean) = score.summary();
        let doc = json!({ "id": a.id, "score": score.value, "per_column_summary": { "min": min, "max": max, "mean": mean } });
        println!("{doc}");
    } else {
        println!("{}", score.value);
    }
    Ok(())
}

fn run_evaluate(a: EvaluateArgs) -> CliResult<()> {
    let s = settings(&a.common, Some(&a.training), a.k, a.grouping)?;
    let manifest = load_manifest(&a.manifest)?;
    let report = pipeline::evaluate(&manifest, &s)?;
    let provenance = json!({
        "manifest": a.manifest.display().to_string(),
        "seed": s.seed,
        "k": s.k,
        "grouping": s.grouping.to_string(),
        "training": config_json(&s.train_config()),
    });
    write_report_files(&a.out, &report, provenance)?;
    println!("{}", aggregate_line(&report));
    Ok(())
}

fn run_synth(a: SynthArgs) -> CliResult<()> {
    let s = settings(&a.common, None, None, None)?;
    let entries = pipeline::synth(&a.out, a.count, s.seed, &SynthConfig::default(), &thread_pool(s.jobs)?)?;
    info!("wrote {} clips to {}", entries.len(), a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract(a) => run_extract(a),
        Command::Train(a) => run_train(a),
        Command::Predict(a) => run_predict(a),
        Command::Evaluate(a) => run_evaluate(a),
        Command::Synth(a) => run_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut msg = e.to_string();
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                let text = s.to_string();
                if !msg.contains(&text) {
                    msg.push_str(": ");
                    msg.push_str(&text);
                }
                source = s.source();
            }
            eprintln!("error [{}]: {msg}", e.module());
            ExitCode::from(1)
        }
    }
}

//! File-backed workflows: extraction, training, evaluation and corpus
//! synthesis. Per-clip work runs on a rayon pool capped at `jobs` threads;
//! results are always collected in manifest order.

use std::path::{Path, PathBuf};

use log::info;
use rayon::prelude::*;

use avq_core::audio::{spectrogram, AudioFeatures};
use avq_core::cv::{assemble_report, plan_folds, run_fold, source_key, CvClip, EvalReport};
use avq_core::distortion::synth::{synth_clip, SynthConfig};
use avq_core::fusion::{assemble_global, build_target, fuse, AudiovisualFeatures, GlobalTrainingSet, TargetMatrix};
use avq_core::media::{parse_wav, parse_y4m, write_wav, write_y4m, AudioSignal, FrameSequence};
use avq_core::neural::{train_deep_model, DeepModel, TrainingReport};
use avq_core::visual::{VisualExtractor, VisualFeatures};

use crate::error::{CliError, CliResult};
use crate::fsutil::{ensure_dir, read_bytes, write_bytes};
use crate::manifest::{write_manifest, DatasetManifest, ManifestEntry};
use crate::settings::Settings;

pub fn thread_pool(jobs: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {jobs} worker threads: {e}")))
}

pub fn load_video(path: &Path) -> CliResult<FrameSequence> {
    Ok(parse_y4m(&read_bytes(path)?)?)
}

pub fn load_audio(path: &Path) -> CliResult<AudioSignal> {
    Ok(parse_wav(&read_bytes(path)?)?)
}

/// Per-clip feature matrices.
#[derive(Debug, Clone)]
pub struct ClipFeatures {
    pub id: String,
    pub visual: VisualFeatures,
    pub audio: AudioFeatures,
    pub fused: AudiovisualFeatures,
}

pub fn extract_media(id: &str, video: &FrameSequence, audio: &AudioSignal) -> CliResult<ClipFeatures> {
    let visual = VisualExtractor::new().extract(video)?;
    let audio = spectrogram(audio)?;
    let fused = fuse(&visual, &audio)?;
    Ok(ClipFeatures {
        id: id.to_string(),
        visual,
        audio,
        fused,
    })
}

pub fn extract_pair(id: &str, video: &Path, audio: &Path) -> CliResult<ClipFeatures> {
    let run = || extract_media(id, &load_video(video)?, &load_audio(audio)?);
    run().map_err(|e| CliError::in_clip(id, e))
}

/// Extracts every manifest entry on `pool`, in manifest order.
pub fn extract_manifest(manifest: &DatasetManifest, pool: &rayon::ThreadPool) -> CliResult<Vec<ClipFeatures>> {
    pool.install(|| {
        manifest
            .entries
            .par_iter()
            .map(|e| {
                let f = extract_pair(&e.id, &e.video_path, &e.audio_path)?;
                info!("extracted {} ({} columns)", e.id, f.fused.columns());
                Ok(f)
            })
            .collect()
    })
}

/// Global training set over all clips, in manifest order.
pub fn global_set(manifest: &DatasetManifest, features: &[ClipFeatures]) -> CliResult<GlobalTrainingSet> {
    let targets: Vec<TargetMatrix> = manifest
        .entries
        .iter()
        .zip(features)
        .map(|(e, f)| build_target(e.mos, f.fused.columns()).map_err(|err| CliError::in_clip(&e.id, err)))
        .collect::<CliResult<_>>()?;
    let parts: Vec<_> = features
        .iter()
        .zip(&targets)
        .map(|(f, t)| (&f.fused, t, f.id.as_str()))
        .collect();
    Ok(assemble_global(&parts)?)
}

pub fn train(manifest: &DatasetManifest, settings: &Settings) -> CliResult<(DeepModel, TrainingReport)> {
    let pool = thread_pool(settings.jobs)?;
    let features = extract_manifest(manifest, &pool)?;
    let set = global_set(manifest, &features)?;
    drop(features);
    info!("training on {} columns from {} clips", set.columns(), set.clip_ids().len());
    Ok(train_deep_model(&set, &settings.train_config())?)
}

pub fn cv_clips(manifest: &DatasetManifest, features: Vec<ClipFeatures>) -> Vec<CvClip> {
    manifest
        .entries
        .iter()
        .zip(features)
        .map(|(e, f)| CvClip {
            id: e.id.clone(),
            features: f.fused,
            mos: e.mos,
            video_label: e.video_distortion.clone(),
            audio_label: e.audio_distortion.clone(),
            group: source_key(&e.id).to_string(),
        })
        .collect()
}

/// k-fold evaluation; folds train concurrently on the pool and are
/// reassembled in fold order.
pub fn evaluate(manifest: &DatasetManifest, settings: &Settings) -> CliResult<EvalReport> {
    let pool = thread_pool(settings.jobs)?;
    let features = extract_manifest(manifest, &pool)?;
    let clips = cv_clips(manifest, features);
    let folds = plan_folds(&clips, settings.k, settings.seed, settings.grouping)?;
    let cfg = settings.train_config();
    let outcomes = pool.install(|| {
        (0..folds.len())
            .into_par_iter()
            .map(|f| {
                let o = run_fold(&clips, &folds, f, &cfg)?;
                info!("fold {f}: {} test clips, leakage-free: {}", o.test.len(), o.leakage_free);
                Ok(o)
            })
            .collect::<avq_core::Result<Vec<_>>>()
    })?;
    Ok(assemble_report(&clips, outcomes, settings.seed, settings.grouping)?)
}

/// Generates `count` clips under `out_dir/clips` and writes
/// `out_dir/manifest.csv` with paths relative to `out_dir`.
pub fn synth(out_dir: &Path, count: usize, seed: u64, cfg: &SynthConfig, pool: &rayon::ThreadPool) -> CliResult<Vec<ManifestEntry>> {
    let clip_dir = out_dir.join("clips");
    ensure_dir(&clip_dir)?;
    let entries: Vec<ManifestEntry> = pool.install(|| {
        (0..count)
            .into_par_iter()
            .map(|i| {
                let c = synth_clip(seed, i, cfg)?;
                let video_rel = PathBuf::from("clips").join(format!("{}.y4m", c.id));
                let audio_rel = PathBuf::from("clips").join(format!("{}.wav", c.id));
                write_bytes(&out_dir.join(&video_rel), &write_y4m(&c.video))?;
                write_bytes(&out_dir.join(&audio_rel), &write_wav(&c.audio))?;
                info!("synthesized {} (mos {:.3})", c.id, c.mos);
                Ok(ManifestEntry {
                    id: c.id,
                    video_path: video_rel,
                    audio_path: audio_rel,
                    mos: c.mos,
                    video_distortion: c.video_kind.name().to_string(),
                    audio_distortion: c.audio_kind.name().to_string(),
                    severity: c.severity,
                })
            })
            .collect::<CliResult<Vec<_>>>()
    })?;
    let manifest_path = out_dir.join("manifest.csv");
    let mut buf = Vec::new();
    write_manifest(&mut buf, &entries)?;
    write_bytes(&manifest_path, &buf)?;
    Ok(entries)
}

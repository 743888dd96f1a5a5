//! k-fold cross-validation over pre-extracted clips.
//!
//! The harness is split into [`plan_folds`], [`run_fold`] and
//! [`assemble_report`] so that callers can run folds concurrently;
//! [`cross_validate`] chains them sequentially.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fusion::{assemble_global, build_target, AudiovisualFeatures, TargetMatrix};
use crate::neural::{train_deep_model, TrainConfig, TrainingReport};
use crate::scoring::score_features;
use crate::stats::{mean_std, pcc, rmse, scc};
use crate::{Error, Result};

/// One evaluated clip: its features, opinion score and distortion labels.
#[derive(Debug, Clone)]
pub struct CvClip {
    pub id: String,
    pub features: AudiovisualFeatures,
    pub mos: f64,
    pub video_label: String,
    pub audio_label: String,
    /// Source-content key used by [`FoldGrouping::Source`].
    pub group: String,
}

/// How clips are assigned to folds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FoldGrouping {
    /// Every clip is placed independently.
    #[default]
    Clip,
    /// All clips sharing a source key land in the same fold.
    Source,
}

/// Source key of a clip id: everything before the last `_`, or the whole id.
pub fn source_key(id: &str) -> &str {
    id.rsplit_once('_').map_or(id, |(head, _)| head)
}

/// Sizes of `k` contiguous near-equal partitions of `n` items; the first
/// `n mod k` parts get one extra item.
pub fn partition_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

fn seeded_partition(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || n < k {
        return Err(Error::TooFewEntries { entries: n, k });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for size in partition_sizes(n, k) {
        folds.push(order[start..start + size].to_vec());
        start += size;
    }
    Ok(folds)
}

/// Seeded shuffle of `0..n`, then `k` contiguous test partitions.
pub fn kfold_split(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let mut folds = seeded_partition(n, k, seed)?;
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

/// Like [`kfold_split`] but partitions distinct `groups` (in order of first
/// appearance) so that equal keys share a fold.
pub fn kfold_split_grouped(groups: &[&str], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let mut keys: Vec<&str> = Vec::new();
    let mut member: Vec<usize> = Vec::with_capacity(groups.len());
    for g in groups {
        let idx = keys.iter().position(|k| k == g).unwrap_or_else(|| {
            keys.push(g);
            keys.len() - 1
        });
        member.push(idx);
    }
    let group_folds = seeded_partition(keys.len(), k, seed)?;
    let mut fold_of_group = alloc::vec![0; keys.len()];
    for (f, gs) in group_folds.iter().enumerate() {
        gs.iter().for_each(|&g| fold_of_group[g] = f);
    }
    let mut folds = alloc::vec![Vec::new(); k];
    for (i, &g) in member.iter().enumerate() {
        folds[fold_of_group[g]].push(i);
    }
    Ok(folds)
}

/// Test partitions for `clips` under `grouping`.
pub fn plan_folds(clips: &[CvClip], k: usize, seed: u64, grouping: FoldGrouping) -> Result<Vec<Vec<usize>>> {
    match grouping {
        FoldGrouping::Clip => kfold_split(clips.len(), k, seed),
        FoldGrouping::Source => {
            let keys: Vec<&str> = clips.iter().map(|c| c.group.as_str()).collect();
            kfold_split_grouped(&keys, k, seed)
        }
    }
}

/// Predictions for one fold's test clips, in test-partition order.
#[derive(Debug, Clone)]
pub struct FoldOutcome {
    pub fold: usize,
    pub test: Vec<usize>,
    pub predicted: Vec<f64>,
    /// True when no test clip id appears in the training provenance.
    pub leakage_free: bool,
    pub training: Option<TrainingReport>,
}

/// Trains on every fold but `fold`, then predicts each clip of `fold`.
pub fn run_fold(clips: &[CvClip], folds: &[Vec<usize>], fold: usize, cfg: &TrainConfig) -> Result<FoldOutcome> {
    run_fold_with(clips, folds, fold, |set, test| {
        let (model, report) = train_deep_model(set, cfg)?;
        let predicted = test
            .iter()
            .map(|c| score_features(&model, &c.features).map(|s| s.value))
            .collect::<Result<Vec<_>>>()?;
        Ok((predicted, Some(report)))
    })
}

/// [`run_fold`] with a caller-supplied learner: `fit_predict` receives the
/// training set assembled from the other folds and the held-out clips.
pub fn run_fold_with<F>(clips: &[CvClip], folds: &[Vec<usize>], fold: usize, fit_predict: F) -> Result<FoldOutcome>
where
    F: FnOnce(&crate::fusion::GlobalTrainingSet, &[&CvClip]) -> Result<(Vec<f64>, Option<TrainingReport>)>,
{
    let wrap = |e: Error| Error::Fold {
        fold,
        source: alloc::boxed::Box::new(e),
    };
    let test = folds[fold].clone();
    let targets: Vec<TargetMatrix> = clips
        .iter()
        .map(|c| build_target(c.mos, c.features.columns()))
        .collect::<Result<_>>()
        .map_err(wrap)?;
    let train: Vec<(&AudiovisualFeatures, &TargetMatrix, &str)> = folds
        .iter()
        .enumerate()
        .filter(|(f, _)| *f != fold)
        .flat_map(|(_, idx)| idx.iter())
        .map(|&i| (&clips[i].features, &targets[i], clips[i].id.as_str()))
        .collect();
    let set = assemble_global(&train).map_err(wrap)?;
    let leakage_free = test.iter().all(|&i| !set.contains_clip(&clips[i].id));
    let held_out: Vec<&CvClip> = test.iter().map(|&i| &clips[i]).collect();
    let (predicted, training) = fit_predict(&set, &held_out).map_err(wrap)?;
    if predicted.len() != test.len() {
        return Err(wrap(Error::RowCountMismatch {
            expected: test.len(),
            found: predicted.len(),
        }));
    }
    Ok(FoldOutcome {
        fold,
        test,
        predicted,
        leakage_free,
        training,
    })
}

/// PCC, SCC and RMSE of a set of (predicted, mos) pairs. Correlations are
/// `None` when either side has zero variance or fewer than two pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Agreement {
    pub count: usize,
    pub pcc: Option<f64>,
    pub scc: Option<f64>,
    pub rmse: Option<f64>,
}

impl Agreement {
    pub fn of(predicted: &[f64], mos: &[f64]) -> Self {
        Self {
            count: predicted.len(),
            pcc: pcc(predicted, mos).ok(),
            scc: scc(predicted, mos).ok(),
            rmse: rmse(predicted, mos).ok(),
        }
    }
}

/// Mean and sample standard deviation of a per-fold statistic over the
/// folds where it is defined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread {
    pub mean: f64,
    pub std: f64,
    pub folds: usize,
}

impl Spread {
    fn of(values: impl Iterator<Item = Option<f64>>) -> Option<Self> {
        let v: Vec<f64> = values.flatten().collect();
        if v.is_empty() {
            return None;
        }
        let (mean, std) = mean_std(&v);
        Some(Self {
            mean,
            std,
            folds: v.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldStats {
    pub fold: usize,
    pub agreement: Agreement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateStats {
    pub pcc: Option<Spread>,
    pub scc: Option<Spread>,
    pub rmse: Option<Spread>,
}

/// Pooled agreement restricted to one distortion label.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakdownRow {
    /// `"video"` or `"audio"`.
    pub modality: &'static str,
    pub label: String,
    pub agreement: Agreement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub id: String,
    pub fold: usize,
    pub predicted: f64,
    pub mos: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub k: usize,
    pub seed: u64,
    pub grouping: FoldGrouping,
    pub per_fold: Vec<FoldStats>,
    pub aggregate: AggregateStats,
    pub pooled: Agreement,
    pub breakdown: Vec<BreakdownRow>,
    /// Every clip's held-out prediction, in clip order.
    pub predictions: Vec<Prediction>,
    pub leakage_free: bool,
}

/// Combines fold outcomes (any order) into a report keyed by fold index.
pub fn assemble_report(
    clips: &[CvClip],
    mut outcomes: Vec<FoldOutcome>,
    seed: u64,
    grouping: FoldGrouping,
) -> Result<EvalReport> {
    outcomes.sort_by_key(|o| o.fold);
    let mut slot: Vec<Option<(usize, f64)>> = alloc::vec![None; clips.len()];
    for o in &outcomes {
        for (&i, &p) in o.test.iter().zip(&o.predicted) {
            if slot[i].replace((o.fold, p)).is_some() {
                return Err(Error::DimensionMismatch(alloc::format!("clip {} is in two test folds", clips[i].id)));
            }
        }
    }
    let predictions: Vec<Prediction> = clips
        .iter()
        .zip(&slot)
        .map(|(c, s)| {
            let (fold, predicted) = s.ok_or_else(|| {
                Error::DimensionMismatch(alloc::format!("clip {} is in no test fold", c.id))
            })?;
            Ok(Prediction {
                id: c.id.clone(),
                fold,
                predicted,
                mos: c.mos,
            })
        })
        .collect::<Result<_>>()?;

    let per_fold: Vec<FoldStats> = outcomes
        .iter()
        .map(|o| {
            let mos: Vec<f64> = o.test.iter().map(|&i| clips[i].mos).collect();
            FoldStats {
                fold: o.fold,
                agreement: Agreement::of(&o.predicted, &mos),
            }
        })
        .collect();
    let aggregate = AggregateStats {
        pcc: Spread::of(per_fold.iter().map(|f| f.agreement.pcc)),
        scc: Spread::of(per_fold.iter().map(|f| f.agreement.scc)),
        rmse: Spread::of(per_fold.iter().map(|f| f.agreement.rmse)),
    };
    let pooled = agreement_where(&predictions, |_| true);

    let mut breakdown = Vec::new();
    for modality in ["video", "audio"] {
        let label_of = |c: &CvClip| -> String {
            if modality == "video" {
                c.video_label.clone()
            } else {
                c.audio_label.clone()
            }
        };
        let labels: BTreeMap<String, ()> = clips.iter().map(|c| (label_of(c), ())).collect();
        for label in labels.into_keys() {
            let agreement = agreement_where(&predictions, |i| label_of(&clips[i]) == label);
            breakdown.push(BreakdownRow {
                modality,
                label,
                agreement,
            });
        }
    }

    Ok(EvalReport {
        k: outcomes.len(),
        seed,
        grouping,
        per_fold,
        aggregate,
        pooled,
        breakdown,
        predictions,
        leakage_free: outcomes.iter().all(|o| o.leakage_free),
    })
}

fn agreement_where(predictions: &[Prediction], keep: impl Fn(usize) -> bool) -> Agreement {
    let (p, m): (Vec<f64>, Vec<f64>) = predictions
        .iter()
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .map(|(_, x)| (x.predicted, x.mos))
        .unzip();
    Agreement::of(&p, &m)
}

/// Sequential k-fold cross-validation with the full training recipe.
pub fn cross_validate(
    clips: &[CvClip],
    cfg: &TrainConfig,
    k: usize,
    seed: u64,
    grouping: FoldGrouping,
) -> Result<EvalReport> {
    let folds = plan_folds(clips, k, seed, grouping)?;
    let outcomes = (0..k)
        .map(|f| run_fold(clips, &folds, f, cfg))
        .collect::<Result<Vec<_>>>()?;
    assemble_report(clips, outcomes, seed, grouping)
}

impl core::fmt::Display for FoldGrouping {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            FoldGrouping::Clip => "clip",
            FoldGrouping::Source => "source",
        })
    }
}

impl core::str::FromStr for FoldGrouping {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clip" => Ok(Self::Clip),
            "source" => Ok(Self::Source),
            other => Err(Error::UnknownKind(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::AUDIOVISUAL_ROWS;
    use crate::Matrix;
    use alloc::format;
    use alloc::vec;

    #[test]
    fn fold_sizes() {
        let sizes = |n| kfold_split(n, 10, 1).unwrap().iter().map(Vec::len).collect::<Vec<_>>();
        assert_eq!(sizes(20), vec![2; 10]);
        assert_eq!(sizes(23), vec![3, 3, 3, 2, 2, 2, 2, 2, 2, 2]);
        assert!(matches!(kfold_split(9, 10, 1), Err(Error::TooFewEntries { entries: 9, k: 10 })));
        assert!(kfold_split(5, 1, 1).is_err());
    }

    #[test]
    fn folds_are_seeded_partitions() {
        let a = kfold_split(37, 5, 9).unwrap();
        assert_eq!(a, kfold_split(37, 5, 9).unwrap());
        assert_ne!(a, kfold_split(37, 5, 10).unwrap());
        let mut all: Vec<usize> = a.concat();
        all.sort_unstable();
        assert_eq!(all, (0..37).collect::<Vec<_>>());
    }

    #[test]
    fn grouped_folds_keep_sources_together() {
        let ids: Vec<String> = (0..30).map(|i| format!("src{:03}_{:02}", i / 3, i % 3)).collect();
        let keys: Vec<&str> = ids.iter().map(|s| source_key(s)).collect();
        let folds = kfold_split_grouped(&keys, 5, 4).unwrap();
        for f in &folds {
            assert_eq!(f.len(), 6);
            for &i in f {
                assert!(f.iter().filter(|&&j| keys[j] == keys[i]).count() == 3);
            }
        }
        assert_eq!(source_key("abc"), "abc");
    }

    fn clip(i: usize, mos: f64) -> CvClip {
        let features = AudiovisualFeatures::new(Matrix::from_vec(AUDIOVISUAL_ROWS, 3, vec![i as f64; AUDIOVISUAL_ROWS * 3]).unwrap()).unwrap();
        CvClip {
            id: format!("c{i:02}_0"),
            features,
            mos,
            video_label: ["blur", "noise"][i % 2].into(),
            audio_label: ["echo", "clip", "chop"][i % 3].into(),
            group: format!("c{i:02}"),
        }
    }

    #[test]
    fn oracle_predictor_gives_perfect_agreement() {
        let clips: Vec<CvClip> = (0..20).map(|i| clip(i, 1.0 + 0.2 * i as f64)).collect();
        let folds = plan_folds(&clips, 4, 3, FoldGrouping::Clip).unwrap();
        let outcomes: Vec<FoldOutcome> = (0..4)
            .rev()
            .map(|f| {
                run_fold_with(&clips, &folds, f, |set, test| {
                    assert_eq!(set.clip_ids().len(), 15);
                    Ok((test.iter().map(|c| c.mos).collect(), None))
                })
                .unwrap()
            })
            .collect();
        let report = assemble_report(&clips, outcomes, 3, FoldGrouping::Clip).unwrap();
        assert!(report.leakage_free);
        assert_eq!(report.per_fold.len(), 4);
        assert!((report.pooled.pcc.unwrap() - 1.0).abs() < 1e-12);
        assert!((report.pooled.scc.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(report.pooled.rmse, Some(0.0));
        let labels: Vec<(&str, &str)> = report.breakdown.iter().map(|b| (b.modality, b.label.as_str())).collect();
        assert_eq!(
            labels,
            vec![("video", "blur"), ("video", "noise"), ("audio", "chop"), ("audio", "clip"), ("audio", "echo")]
        );
        assert!(report.predictions.iter().all(|p| p.predicted == p.mos));
    }

    #[test]
    fn fold_errors_name_the_fold() {
        let clips: Vec<CvClip> = (0..6).map(|i| clip(i, 3.0)).collect();
        let folds = plan_folds(&clips, 3, 0, FoldGrouping::Clip).unwrap();
        let err = run_fold_with(&clips, &folds, 2, |_, _| Err(Error::DegenerateVariance("x"))).unwrap_err();
        assert!(matches!(err, Error::Fold { fold: 2, .. }));
    }
}

//! Clip-level quality scores from network probabilities, plus the
//! evaluation statistics used to compare predictions with opinion scores.

use alloc::vec::Vec;

use crate::audio::spectrogram;
use crate::fusion::{fuse, AudiovisualFeatures, QUALITY_GROUPS};
use crate::media::{AudioSignal, FrameSequence};
use crate::neural::DeepModel;
use crate::visual::visual_features;
use crate::{Error, Matrix, Result};

pub use crate::stats::{pcc, rmse, scc};

/// Tolerance on the sum of a probability column.
pub const COLUMN_SUM_TOLERANCE: f64 = 1e-6;
/// Smallest achievable column score (uniform column, group 1).
pub const MIN_SCORE: f64 = 1.25;
/// Largest achievable column score (certain group 4).
pub const MAX_SCORE: f64 = 5.0;

/// Overall clip score and the per-column scores it averages.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityScore {
    pub value: f64,
    pub per_column: Vec<f64>,
}

impl QualityScore {
    pub fn from_columns(per_column: Vec<f64>) -> Result<Self> {
        if per_column.is_empty() {
            return Err(Error::EmptyInput("no columns to score"));
        }
        let value = crate::stats::mean(&per_column);
        Ok(Self { value, per_column })
    }

    /// `(min, max, mean)` of the per-column scores.
    pub fn summary(&self) -> (f64, f64, f64) {
        let min = self.per_column.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.per_column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (min, max, self.value)
    }
}

/// Score of each probability column: its 1-based argmax group plus the
/// winning probability. Ties resolve to the lowest group.
pub fn column_scores(probs: &Matrix) -> Result<Vec<f64>> {
    if probs.rows() != QUALITY_GROUPS {
        return Err(Error::RowCountMismatch {
            expected: QUALITY_GROUPS,
            found: probs.rows(),
        });
    }
    (0..probs.cols())
        .map(|j| {
            let col = probs.column(j);
            let sum: f64 = col.iter().sum();
            if !(libm::fabs(sum - 1.0) <= COLUMN_SUM_TOLERANCE) {
                return Err(Error::NotAProbabilityColumn { column: j, sum });
            }
            let (mut best, mut best_p) = (0, col[0]);
            for (g, &p) in col.iter().enumerate().skip(1) {
                if p > best_p {
                    best = g;
                    best_p = p;
                }
            }
            Ok((best + 1) as f64 + best_p)
        })
        .collect()
}

/// Scores an already extracted audiovisual feature matrix.
pub fn score_features(model: &DeepModel, features: &AudiovisualFeatures) -> Result<QualityScore> {
    let probs = model.forward(&features.data)?;
    QualityScore::from_columns(column_scores(&probs)?)
}

/// Full pipeline: features, fusion, network, column scores, mean.
pub fn predict_quality(model: &DeepModel, video: &FrameSequence, audio: &AudioSignal) -> Result<QualityScore> {
    let visual = visual_features(video)?;
    let spectral = spectrogram(audio)?;
    score_features(model, &fuse(&visual, &spectral)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn single(col: [f64; 4]) -> Result<f64> {
        Ok(column_scores(&Matrix::from_columns(&[col.to_vec()])?)?[0])
    }

    #[test]
    fn worked_columns() {
        assert_eq!(single([0.0, 0.0, 0.0, 1.0]).unwrap(), 5.0);
        assert_eq!(single([0.7, 0.1, 0.1, 0.1]).unwrap(), 1.7);
        assert_eq!(single([0.25; 4]).unwrap(), 1.25);
        assert_eq!(single([0.1, 0.4, 0.4, 0.1]).unwrap(), 2.4);
    }

    #[test]
    fn rejects_non_probability_columns() {
        assert!(matches!(
            single([0.5, 0.5, 0.5, 0.0]),
            Err(Error::NotAProbabilityColumn { column: 0, .. })
        ));
        assert!(single([f64::NAN, 0.0, 0.0, 1.0]).is_err());
        assert!(column_scores(&Matrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn score_is_column_mean() {
        let s = QualityScore::from_columns(vec![1.7, 2.3]).unwrap();
        assert!((s.value - 2.0).abs() < 1e-15);
        assert_eq!(s.summary(), (1.7, 2.3, s.value));
        assert!(QualityScore::from_columns(vec![]).is_err());
    }
}

//! Alignment and merging of visual and audio features, one-hot quality
//! targets, global training-set assembly and min/max input scaling.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::audio::{AudioFeatures, BANDS};
use crate::visual::{VisualFeatures, VISUAL_ROWS};
use crate::{Error, Matrix, Result};

pub const AUDIOVISUAL_ROWS: usize = VISUAL_ROWS + BANDS;
pub const QUALITY_GROUPS: usize = 4;

/// `115 x m`: rows 0..90 visual, rows 90..115 audio.
#[derive(Debug, Clone, PartialEq)]
pub struct AudiovisualFeatures {
    pub data: Matrix,
}

impl AudiovisualFeatures {
    pub fn new(data: Matrix) -> Result<Self> {
        if data.rows() != AUDIOVISUAL_ROWS {
            return Err(Error::RowCountMismatch {
                expected: AUDIOVISUAL_ROWS,
                found: data.rows(),
            });
        }
        Ok(Self { data })
    }

    pub fn columns(&self) -> usize {
        self.data.cols()
    }
}

/// `4 x m` one-hot quality-group matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMatrix {
    pub data: Matrix,
}

impl TargetMatrix {
    pub fn columns(&self) -> usize {
        self.data.cols()
    }
}

/// Source column for each of `m` aligned columns: `floor(j * n / m)`.
pub fn align_index_map(n: usize, m: usize) -> Vec<usize> {
    (0..m).map(|j| j * n / m).collect()
}

/// Stretches (or, when `n > m`, subsamples) a feature matrix to `m`
/// columns with the monotone index map.
pub fn align_replicate(features: &Matrix, m: usize) -> Matrix {
    features.select_columns(&align_index_map(features.cols(), m))
}

/// Stacks aligned visual rows over audio rows.
pub fn merge(visual_aligned: &Matrix, audio: &Matrix) -> Result<AudiovisualFeatures> {
    if visual_aligned.rows() != VISUAL_ROWS {
        return Err(Error::RowCountMismatch {
            expected: VISUAL_ROWS,
            found: visual_aligned.rows(),
        });
    }
    if audio.rows() != BANDS {
        return Err(Error::RowCountMismatch {
            expected: BANDS,
            found: audio.rows(),
        });
    }
    AudiovisualFeatures::new(visual_aligned.vstack(audio)?)
}

/// Aligns the visual matrix on the audio time axis and merges.
pub fn fuse(visual: &VisualFeatures, audio: &AudioFeatures) -> Result<AudiovisualFeatures> {
    merge(&align_replicate(&visual.data, audio.frames()), &audio.data)
}

/// Quality group (1-based) of an opinion score: `[1,2)→1, [2,3)→2,
/// [3,4)→3, [4,5]→4`.
pub fn quality_group(mos: f64) -> Result<usize> {
    if !(1.0..=5.0).contains(&mos) {
        return Err(Error::MosOutOfRange(mos));
    }
    Ok((libm::floor(mos) as usize).min(QUALITY_GROUPS))
}

pub fn build_target(mos: f64, m: usize) -> Result<TargetMatrix> {
    let g = quality_group(mos)?;
    let mut data = Matrix::zeros(QUALITY_GROUPS, m);
    data.row_mut(g - 1).fill(1.0);
    Ok(TargetMatrix { data })
}

/// Column-wise concatenation of every clip's features and targets.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalTrainingSet {
    pub features: Matrix,
    pub targets: Matrix,
    clip_ids: Vec<String>,
    /// Clip index (into `clip_ids`) of each column.
    column_clip: Vec<usize>,
}

impl GlobalTrainingSet {
    pub fn columns(&self) -> usize {
        self.features.cols()
    }

    pub fn clip_ids(&self) -> &[String] {
        &self.clip_ids
    }

    /// Id of the clip that contributed column `col`.
    pub fn provenance(&self, col: usize) -> &str {
        &self.clip_ids[self.column_clip[col]]
    }

    /// Column range `[start, end)` contributed by clip `clip`.
    pub fn clip_columns(&self, clip: usize) -> core::ops::Range<usize> {
        let start = self.column_clip.partition_point(|&c| c < clip);
        let end = self.column_clip.partition_point(|&c| c <= clip);
        start..end
    }

    pub fn contains_clip(&self, id: &str) -> bool {
        self.clip_ids.iter().any(|c| c == id)
    }
}

pub fn assemble_global(clips: &[(&AudiovisualFeatures, &TargetMatrix, &str)]) -> Result<GlobalTrainingSet> {
    if clips.is_empty() {
        return Err(Error::EmptyInput("no clips to assemble"));
    }
    for (f, t, id) in clips {
        if f.columns() != t.columns() || t.data.rows() != QUALITY_GROUPS {
            return Err(Error::PerClipMismatch {
                id: id.to_string(),
                features: f.columns(),
                targets: t.columns(),
            });
        }
    }
    let features: Vec<&Matrix> = clips.iter().map(|(f, _, _)| &f.data).collect();
    let targets: Vec<&Matrix> = clips.iter().map(|(_, t, _)| &t.data).collect();
    let column_clip = clips
        .iter()
        .enumerate()
        .flat_map(|(i, (f, _, _))| core::iter::repeat(i).take(f.columns()))
        .collect();
    Ok(GlobalTrainingSet {
        features: Matrix::hstack(&features)?,
        targets: Matrix::hstack(&targets)?,
        clip_ids: clips.iter().map(|(_, _, id)| id.to_string()).collect(),
        column_clip,
    })
}

/// Per-row min/max scaling to `[0, 1]`, fitted on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Scaler {
    pub fn fit(features: &Matrix) -> Result<Self> {
        if features.cols() < 2 {
            return Err(Error::EmptyInput("scaler needs at least two columns"));
        }
        let (min, max) = (0..features.rows())
            .map(|r| {
                let row = features.row(r);
                let lo = row.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            })
            .unzip();
        Ok(Self { min, max })
    }

    pub fn dims(&self) -> usize {
        self.min.len()
    }

    /// Scales one value of row `r`; constant rows map to 0 and the result is
    /// clamped to `[0, 1]`.
    #[inline]
    pub fn scale(&self, r: usize, x: f64) -> f64 {
        let span = self.max[r] - self.min[r];
        if span > 0.0 {
            ((x - self.min[r]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    pub fn apply(&self, features: &Matrix) -> Result<Matrix> {
        if features.rows() != self.dims() {
            return Err(Error::RowCountMismatch {
                expected: self.dims(),
                found: features.rows(),
            });
        }
        let mut out = features.clone();
        for r in 0..out.rows() {
            for v in out.row_mut(r) {
                *v = self.scale(r, *v);
            }
        }
        Ok(out)
    }
}

pub fn fit_scaler(features: &Matrix) -> Result<Scaler> {
    Scaler::fit(features)
}

pub fn apply_scaler(scaler: &Scaler, features: &Matrix) -> Result<Matrix> {
    scaler.apply(features)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn index_maps() {
        assert_eq!(align_index_map(4, 4), vec![0, 1, 2, 3]);
        assert_eq!(align_index_map(2, 4), vec![0, 0, 1, 1]);
        assert_eq!(align_index_map(3, 7), vec![0, 0, 0, 1, 1, 2, 2]);
        assert_eq!(align_index_map(6, 3), vec![0, 2, 4]);
    }

    #[test]
    fn merge_shapes_and_order() {
        let v = Matrix::from_vec(90, 5, (0..450).map(|i| i as f64).collect()).unwrap();
        let a = Matrix::from_vec(25, 5, (0..125).map(|i| -(i as f64)).collect()).unwrap();
        let av = merge(&v, &a).unwrap();
        assert_eq!(av.data.shape(), (115, 5));
        assert_eq!(av.data.row(90), a.row(0));
        let a4 = Matrix::zeros(25, 4);
        assert_eq!(
            merge(&v, &a4).unwrap_err(),
            Error::ColumnCountMismatch { left: 5, right: 4 }
        );
    }

    #[test]
    fn target_groups() {
        let t = build_target(1.65, 3).unwrap();
        for j in 0..3 {
            assert_eq!(t.data.column(j), vec![1.0, 0.0, 0.0, 0.0]);
        }
        assert_eq!(build_target(3.52, 1).unwrap().data.column(0), vec![0.0, 0.0, 1.0, 0.0]);
        assert_eq!(quality_group(5.0).unwrap(), 4);
        assert_eq!(quality_group(1.0).unwrap(), 1);
        assert_eq!(quality_group(2.0).unwrap(), 2);
        assert_eq!(quality_group(5.3), Err(Error::MosOutOfRange(5.3)));
        assert!(quality_group(f64::NAN).is_err());
    }

    fn clip(m: usize, fill: f64, mos: f64) -> (AudiovisualFeatures, TargetMatrix) {
        let mut data = Matrix::zeros(AUDIOVISUAL_ROWS, m);
        data.map_inplace(|_| fill);
        (AudiovisualFeatures::new(data).unwrap(), build_target(mos, m).unwrap())
    }

    #[test]
    fn global_assembly() {
        let (f1, t1) = clip(3, 1.0, 1.5);
        let (f2, t2) = clip(4, 2.0, 4.5);
        let g = assemble_global(&[(&f1, &t1, "a"), (&f2, &t2, "b")]).unwrap();
        assert_eq!(g.columns(), 7);
        assert_eq!(g.provenance(5), "b");
        assert_eq!(g.provenance(2), "a");
        assert_eq!(g.clip_columns(1), 3..7);
        assert_eq!(g.features.column_range(3, 7), f2.data);
        assert_eq!(g.targets.column_range(0, 3), t1.data);

        let single = assemble_global(&[(&f1, &t1, "a")]).unwrap();
        assert_eq!(single.features, f1.data);
        assert_eq!(single.targets, t1.data);

        let (f3, _) = clip(2, 0.0, 2.0);
        assert!(matches!(
            assemble_global(&[(&f3, &t1, "c")]),
            Err(Error::PerClipMismatch { .. })
        ));
        assert!(assemble_global(&[]).is_err());
    }

    #[test]
    fn scaler_rules() {
        let x = Matrix::from_rows(&[[2.0, 4.0], [7.0, 7.0]]).unwrap();
        let s = fit_scaler(&x).unwrap();
        let y = apply_scaler(&s, &x).unwrap();
        assert_eq!(y.row(0), &[0.0, 1.0]);
        assert_eq!(y.row(1), &[0.0, 0.0]);
        let probe = Matrix::from_rows(&[[9.0], [1.0]]).unwrap();
        assert_eq!(apply_scaler(&s, &probe).unwrap().column(0), vec![1.0, 0.0]);
        assert!(fit_scaler(&Matrix::zeros(2, 1)).is_err());
    }
}

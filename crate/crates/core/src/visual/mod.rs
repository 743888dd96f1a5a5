//! The 90-row visual feature matrix: 88 NSS statistics plus spatial and
//! temporal information, one column per frame.

mod decompose;
mod ggd;
mod nss;
mod siti;

use alloc::string::String;
use alloc::vec::Vec;

use crate::media::FrameSequence;
use crate::{Matrix, Result};

pub use decompose::{
    oriented_decompose, orientation_radians, OrientedFilterBank, Plane, Subbands, CENTER_FREQUENCY, KERNEL_SIZE,
    MIN_FRAME_SIDE, ORIENTATIONS, SCALES,
};
pub use ggd::{fit_ggd, grid_alpha, moment_ratio, GgdFit, GgdTable, ALPHA_MAX, ALPHA_MIN, ALPHA_STEP, MIN_SAMPLES};
pub use nss::{
    ggd_alpha_index, nss_feature_names, nss_features, nss_features_with, NssFeatures, NSS_FEATURES,
    ORIENTATION_PAIR_RANGE,
};
pub use siti::{si_ti, spatial_information, temporal_information};

pub const VISUAL_ROWS: usize = NSS_FEATURES + 2;
/// Row index of spatial information.
pub const SI_ROW: usize = NSS_FEATURES;
/// Row index of temporal information.
pub const TI_ROW: usize = NSS_FEATURES + 1;

/// `90 x n` matrix: rows 0..88 NSS, row 88 SI, row 89 TI.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualFeatures {
    pub data: Matrix,
    /// Statistics replaced by 0 because their subband was degenerate.
    pub degenerate_stats: usize,
}

impl VisualFeatures {
    pub fn frames(&self) -> usize {
        self.data.cols()
    }

    pub fn row_names() -> Vec<String> {
        let mut names = nss_feature_names();
        names.push("si".into());
        names.push("ti".into());
        names
    }
}

/// Reusable extractor holding the filter bank and the GGD lookup table.
#[derive(Debug, Clone, Default)]
pub struct VisualExtractor {
    bank: OrientedFilterBank,
    table: GgdTable,
}

impl VisualExtractor {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn frame_features(&self, luma: &[u8], width: usize, height: usize) -> Result<NssFeatures> {
        nss_features_with(&self.bank, &self.table, luma, width, height)
    }

    pub fn extract(&self, frames: &FrameSequence) -> Result<VisualFeatures> {
        let (w, h) = (frames.width(), frames.height());
        let n = frames.len();
        let mut data = Matrix::zeros(VISUAL_ROWS, n);
        let mut degenerate_stats = 0;
        for (t, luma) in frames.frames().iter().enumerate() {
            let f = self.frame_features(luma, w, h)?;
            degenerate_stats += f.degenerate;
            for (r, &v) in f.values.iter().enumerate() {
                data.set(r, t, v);
            }
        }
        let [si, ti] = si_ti(frames);
        data.row_mut(SI_ROW).copy_from_slice(&si);
        data.row_mut(TI_ROW).copy_from_slice(&ti);
        Ok(VisualFeatures { data, degenerate_stats })
    }
}

/// Extracts the visual feature matrix with a fresh [`VisualExtractor`].
pub fn visual_features(frames: &FrameSequence) -> Result<VisualFeatures> {
    VisualExtractor::new().extract(frames)
}

//! The 88 natural-scene-statistics features of one frame.
//!
//! Layout (0-based indices):
//!
//! | rows    | content                                                          |
//! |---------|------------------------------------------------------------------|
//! | 0..24   | GGD `(alpha, sigma)` per subband, subband `s*6 + o`              |
//! | 24..48  | `(kurtosis, skewness)` per subband, same order                   |
//! | 48..78  | per scale, Pearson correlation of `|c|` for the 15 orientation pairs `(i, j)`, `i < j`, lexicographic |
//! | 78..84  | per orientation, correlation of `|c|` across scales (scale 2 upsampled 2x) |
//! | 84..88  | highpass residual: GGD alpha, GGD sigma, kurtosis, skewness      |
//!
//! Statistics that are undefined on degenerate (zero-variance) data are
//! reported as 0 and counted in [`NssFeatures::degenerate`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::decompose::{OrientedFilterBank, Plane, ORIENTATIONS, SCALES};
use super::ggd::GgdTable;
use crate::stats::{central_moments, pearson_raw};
use crate::Result;

pub const NSS_FEATURES: usize = 88;
const SUBBANDS: usize = SCALES * ORIENTATIONS;
const PAIRS: usize = ORIENTATIONS * (ORIENTATIONS - 1) / 2;

const GGD_OFFSET: usize = 0;
const MOMENT_OFFSET: usize = GGD_OFFSET + 2 * SUBBANDS;
const PAIR_OFFSET: usize = MOMENT_OFFSET + 2 * SUBBANDS;
const CROSS_SCALE_OFFSET: usize = PAIR_OFFSET + SCALES * PAIRS;
const RESIDUAL_OFFSET: usize = CROSS_SCALE_OFFSET + ORIENTATIONS;
const _: () = assert!(RESIDUAL_OFFSET + 4 == NSS_FEATURES);

/// Feature vector plus the number of statistics that fell back to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct NssFeatures {
    pub values: [f64; NSS_FEATURES],
    pub degenerate: usize,
}

fn to_f64(p: &Plane) -> Vec<f64> {
    p.data.iter().map(|&v| v as f64).collect()
}

fn abs_f64(p: &Plane) -> Vec<f64> {
    p.data.iter().map(|&v| (v as f64).abs()).collect()
}

/// Sample kurtosis `m4/m2²` and skewness `m3/m2^1.5`; `None` if `m2 == 0`.
fn kurtosis_skewness(x: &[f64]) -> Option<(f64, f64)> {
    let (m2, m3, m4) = central_moments(x);
    if m2 <= 0.0 {
        return None;
    }
    Some((m4 / (m2 * m2), m3 / (m2 * libm::sqrt(m2))))
}

struct Collector {
    values: [f64; NSS_FEATURES],
    degenerate: usize,
}

impl Collector {
    fn put(&mut self, at: usize, v: Option<f64>) {
        match v {
            Some(v) if v.is_finite() => self.values[at] = v,
            _ => {
                self.values[at] = 0.0;
                self.degenerate += 1;
            }
        }
    }

    fn marginal(&mut self, table: &GgdTable, x: &[f64], ggd_at: usize, moments_at: usize) {
        let fit = table.fit(x).ok();
        self.put(ggd_at, fit.map(|f| f.alpha));
        self.put(ggd_at + 1, fit.map(|f| f.sigma));
        let ks = kurtosis_skewness(x);
        self.put(moments_at, ks.map(|k| k.0));
        self.put(moments_at + 1, ks.map(|k| k.1));
    }
}

/// Computes the 88-feature vector of one luma frame.
pub fn nss_features_with(
    bank: &OrientedFilterBank,
    table: &GgdTable,
    luma: &[u8],
    width: usize,
    height: usize,
) -> Result<NssFeatures> {
    let sb = bank.decompose(luma, width, height)?;
    let mut c = Collector {
        values: [0.0; NSS_FEATURES],
        degenerate: 0,
    };

    for s in 0..SCALES {
        for o in 0..ORIENTATIONS {
            let idx = s * ORIENTATIONS + o;
            let x = to_f64(&sb.bands[s][o]);
            c.marginal(table, &x, GGD_OFFSET + 2 * idx, MOMENT_OFFSET + 2 * idx);
        }
    }

    let magnitudes: [[Vec<f64>; ORIENTATIONS]; SCALES] =
        core::array::from_fn(|s| core::array::from_fn(|o| abs_f64(&sb.bands[s][o])));
    for (s, mags) in magnitudes.iter().enumerate() {
        let mut p = 0;
        for i in 0..ORIENTATIONS {
            for j in i + 1..ORIENTATIONS {
                c.put(PAIR_OFFSET + s * PAIRS + p, pearson_raw(&mags[i], &mags[j]));
                p += 1;
            }
        }
    }

    for o in 0..ORIENTATIONS {
        let coarse = &sb.bands[1][o];
        let fine = &sb.bands[0][o];
        let (w, h) = (2 * coarse.width, 2 * coarse.height);
        let up = abs_f64(&coarse.upsample2_to(w, h));
        let mut aligned = Vec::with_capacity(w * h);
        for y in 0..h {
            aligned.extend(fine.data[y * fine.width..y * fine.width + w].iter().map(|&v| (v as f64).abs()));
        }
        c.put(CROSS_SCALE_OFFSET + o, pearson_raw(&aligned, &up));
    }

    let residual = to_f64(&sb.residual);
    c.marginal(table, &residual, RESIDUAL_OFFSET, RESIDUAL_OFFSET + 2);

    Ok(NssFeatures {
        values: c.values,
        degenerate: c.degenerate,
    })
}

/// Computes the 88-feature vector with a freshly built filter bank and table.
pub fn nss_features(luma: &[u8], width: usize, height: usize) -> Result<NssFeatures> {
    nss_features_with(&OrientedFilterBank::new(), &GgdTable::new(), luma, width, height)
}

/// Human-readable names of the 88 features, in layout order.
pub fn nss_feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(NSS_FEATURES);
    let band = |i: usize| format!("s{}o{}", i / ORIENTATIONS + 1, (i % ORIENTATIONS) * 30);
    for i in 0..SUBBANDS {
        names.push(format!("ggd_alpha_{}", band(i)));
        names.push(format!("ggd_sigma_{}", band(i)));
    }
    for i in 0..SUBBANDS {
        names.push(format!("kurtosis_{}", band(i)));
        names.push(format!("skewness_{}", band(i)));
    }
    for s in 0..SCALES {
        for i in 0..ORIENTATIONS {
            for j in i + 1..ORIENTATIONS {
                names.push(format!("corr_s{}_o{}_o{}", s + 1, i * 30, j * 30));
            }
        }
    }
    for o in 0..ORIENTATIONS {
        names.push(format!("corr_scales_o{}", o * 30));
    }
    for n in ["ggd_alpha", "ggd_sigma", "kurtosis", "skewness"] {
        names.push(format!("{n}_residual"));
    }
    names
}

/// Index range of the 30 orientation-pair correlations.
pub const ORIENTATION_PAIR_RANGE: core::ops::Range<usize> = PAIR_OFFSET..CROSS_SCALE_OFFSET;

/// Index of the GGD shape for subband `(scale, orientation)`, 0-based.
pub const fn ggd_alpha_index(scale: usize, orientation: usize) -> usize {
    GGD_OFFSET + 2 * (scale * ORIENTATIONS + orientation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn layout_and_names() {
        let names = nss_feature_names();
        assert_eq!(names.len(), NSS_FEATURES);
        assert_eq!(names[ggd_alpha_index(1, 3)], "ggd_alpha_s2o90");
        assert_eq!(names[ORIENTATION_PAIR_RANGE.start], "corr_s1_o0_o30");
        assert_eq!(ORIENTATION_PAIR_RANGE.len(), 30);
    }

    #[test]
    fn constant_frame_is_all_degenerate_zeros() {
        let f = nss_features(&vec![80u8; 32 * 32], 32, 32).unwrap();
        assert!(f.values.iter().all(|&v| v == 0.0));
        assert_eq!(f.degenerate, NSS_FEATURES);
    }
}

//! Moment-matching fit of a zero-mean generalized Gaussian distribution.

use alloc::vec::Vec;

use crate::{Error, Result};

pub const ALPHA_MIN: f64 = 0.2;
pub const ALPHA_MAX: f64 = 10.0;
pub const ALPHA_STEP: f64 = 0.001;
const GRID_LEN: usize = 9801;
pub const MIN_SAMPLES: usize = 64;

/// Shape and scale of a fitted GGD.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GgdFit {
    pub alpha: f64,
    pub sigma: f64,
}

/// The moment ratio `Γ(1/α)Γ(3/α)/Γ(2/α)²` tabulated over the shape grid
/// `0.200, 0.201, ..., 10.000`.
#[derive(Debug, Clone)]
pub struct GgdTable {
    ratios: Vec<f64>,
}

impl Default for GgdTable {
    fn default() -> Self {
        Self::new()
    }
}

impl GgdTable {
    pub fn new() -> Self {
        let ratios = (0..GRID_LEN).map(|i| moment_ratio(grid_alpha(i))).collect();
        Self { ratios }
    }

    pub fn len(&self) -> usize {
        self.ratios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ratios.is_empty()
    }

    /// Grid objective `|ratio(alpha_i) - r|`.
    pub fn objective(&self, index: usize, r: f64) -> f64 {
        (self.ratios[index] - r).abs()
    }

    /// Index of the grid point minimizing the objective; ties go to the
    /// smaller shape.
    pub fn best_index(&self, r: f64) -> usize {
        let mut best = 0;
        let mut best_err = f64::INFINITY;
        for (i, &ratio) in self.ratios.iter().enumerate() {
            let err = (ratio - r).abs();
            if err < best_err {
                best = i;
                best_err = err;
            }
        }
        best
    }

    pub fn fit(&self, samples: &[f64]) -> Result<GgdFit> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::DegenerateInput("fewer than 64 samples"));
        }
        let first = samples[0];
        if samples.iter().all(|&v| v == first) {
            return Err(Error::DegenerateInput("all samples equal"));
        }
        let n = samples.len() as f64;
        let (mut abs_sum, mut sq_sum) = (0.0, 0.0);
        for &v in samples {
            abs_sum += v.abs();
            sq_sum += v * v;
        }
        let m1 = abs_sum / n;
        let m2 = sq_sum / n;
        let r = m2 / (m1 * m1);
        Ok(GgdFit {
            alpha: grid_alpha(self.best_index(r)),
            sigma: libm::sqrt(m2),
        })
    }
}

pub fn grid_alpha(index: usize) -> f64 {
    // integer thousandths avoid accumulated step error
    (200 + index) as f64 / 1000.0
}

/// `Γ(1/α)Γ(3/α)/Γ(2/α)²`, evaluated in log space.
pub fn moment_ratio(alpha: f64) -> f64 {
    libm::exp(libm::lgamma(1.0 / alpha) + libm::lgamma(3.0 / alpha) - 2.0 * libm::lgamma(2.0 / alpha))
}

/// One-off fit; builds a fresh table. Reuse a [`GgdTable`] for many fits.
pub fn fit_ggd(samples: &[f64]) -> Result<GgdFit> {
    GgdTable::new().fit(samples)
}

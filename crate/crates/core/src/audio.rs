//! 25-band auditory spectrogram.
//!
//! Framing uses a 32 ms Hann window with 50% hop. Each frame's power
//! spectrum is summed into 25 rectangular bands whose centers are evenly
//! spaced on the ERB-rate scale between 50 Hz and `min(8000, 0.45 fs)` Hz;
//! band edges sit at geometric midpoints between neighbouring centers.
//! Energies are converted to dB, shifted so the loudest cell is 0 dB and
//! clamped at -80 dB.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::gemm;
use crate::media::AudioSignal;
use crate::{Error, Matrix, Result};

pub const BANDS: usize = 25;
pub const FLOOR_DB: f64 = -80.0;
pub const WINDOW_SECONDS: f64 = 0.032;
pub const LOWEST_CENTER_HZ: f64 = 50.0;
pub const HIGHEST_CENTER_CAP_HZ: f64 = 8000.0;
const LOG_EPSILON: f64 = 1e-12;

/// ERB-rate (Glasberg & Moore) of a frequency in Hz.
pub fn erb_rate(hz: f64) -> f64 {
    21.4 * libm::log10(1.0 + 0.00437 * hz)
}

pub fn erb_rate_to_hz(erb: f64) -> f64 {
    (libm::pow(10.0, erb / 21.4) - 1.0) / 0.00437
}

/// The 25 band centers for a sample rate.
pub fn band_centers(sample_rate: u32) -> Vec<f64> {
    let top = HIGHEST_CENTER_CAP_HZ.min(0.9 * sample_rate as f64 / 2.0);
    let (lo, hi) = (erb_rate(LOWEST_CENTER_HZ), erb_rate(top));
    (0..BANDS)
        .map(|i| erb_rate_to_hz(lo + (hi - lo) * i as f64 / (BANDS - 1) as f64))
        .collect()
}

/// 26 band edges: geometric midpoints between centers, with the outer
/// edges mirrored geometrically.
pub fn band_edges(sample_rate: u32) -> Vec<f64> {
    let c = band_centers(sample_rate);
    let mut edges = Vec::with_capacity(BANDS + 1);
    edges.push(c[0] * libm::sqrt(c[0] / c[1]));
    edges.extend(c.windows(2).map(|p| libm::sqrt(p[0] * p[1])));
    edges.push(c[BANDS - 1] * libm::sqrt(c[BANDS - 1] / c[BANDS - 2]));
    edges
}

/// `W = round(0.032 fs)`, `H = W / 2`.
pub fn frame_geometry(sample_rate: u32) -> (usize, usize) {
    let window = libm::round(WINDOW_SECONDS * sample_rate as f64) as usize;
    (window, window / 2)
}

/// Number of analysis frames for `len` samples, or `None` if shorter than
/// one window.
pub fn frame_count(len: usize, sample_rate: u32) -> Option<usize> {
    let (w, h) = frame_geometry(sample_rate);
    (len >= w && w >= 2).then(|| (len - w) / h + 1)
}

/// `25 x m` dB matrix with the band centers it was computed for.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioFeatures {
    pub data: Matrix,
    pub band_centers: Vec<f64>,
}

impl AudioFeatures {
    pub fn frames(&self) -> usize {
        self.data.cols()
    }
}

/// Precomputed window, DFT basis and bin-to-band map for one sample rate.
#[derive(Debug, Clone)]
pub struct SpectrogramAnalyzer {
    sample_rate: u32,
    window_len: usize,
    hop: usize,
    window: Vec<f64>,
    /// `bins x window_len` cosine and sine bases, row-major.
    cos_basis: Vec<f64>,
    sin_basis: Vec<f64>,
    bins: usize,
    /// Band index of each bin, `None` outside all bands.
    bin_band: Vec<Option<usize>>,
    centers: Vec<f64>,
}

impl SpectrogramAnalyzer {
    pub fn new(sample_rate: u32) -> Result<Self> {
        let (window_len, hop) = frame_geometry(sample_rate);
        if window_len < 4 {
            return Err(Error::InvalidMedia(alloc::format!(
                "sample rate {sample_rate} Hz is too low for a 32 ms window"
            )));
        }
        // periodic Hann
        let window: Vec<f64> = (0..window_len)
            .map(|n| 0.5 - 0.5 * libm::cos(2.0 * core::f64::consts::PI * n as f64 / window_len as f64))
            .collect();
        let bins = window_len / 2 + 1;
        let mut cos_basis = vec![0.0; bins * window_len];
        let mut sin_basis = vec![0.0; bins * window_len];
        for k in 0..bins {
            for n in 0..window_len {
                // reduce k*n mod W first so the phase stays exact
                let phase = 2.0 * core::f64::consts::PI * ((k * n) % window_len) as f64 / window_len as f64;
                cos_basis[k * window_len + n] = libm::cos(phase);
                sin_basis[k * window_len + n] = libm::sin(phase);
            }
        }
        let edges = band_edges(sample_rate);
        let bin_band = (0..bins)
            .map(|k| {
                let f = k as f64 * sample_rate as f64 / window_len as f64;
                (0..BANDS).find(|&b| edges[b] <= f && f < edges[b + 1])
            })
            .collect();
        Ok(Self {
            sample_rate,
            window_len,
            hop,
            window,
            cos_basis,
            sin_basis,
            bins,
            bin_band,
            centers: band_centers(sample_rate),
        })
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    /// Number of DFT bins in the power spectrum (`W/2 + 1`).
    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Per-frame power spectrum, `m x bins` (sample-major).
    pub fn power_spectrum(&self, signal: &AudioSignal) -> Result<Matrix> {
        if signal.sample_rate() != self.sample_rate {
            return Err(Error::InvalidMedia(alloc::format!(
                "analyzer built for {} Hz, signal is {} Hz",
                self.sample_rate,
                signal.sample_rate()
            )));
        }
        let x = signal.samples();
        let w = self.window_len;
        let m = frame_count(x.len(), self.sample_rate).ok_or(Error::SignalTooShort {
            len: x.len(),
            window: w,
        })?;
        let mut frames = vec![0.0; m * w];
        for t in 0..m {
            let src = &x[t * self.hop..t * self.hop + w];
            for ((d, s), win) in frames[t * w..(t + 1) * w].iter_mut().zip(src).zip(&self.window) {
                *d = s * win;
            }
        }
        let mut re = vec![0.0; m * self.bins];
        let mut im = vec![0.0; m * self.bins];
        gemm(m, w, self.bins, 1.0, &frames, false, &self.cos_basis, true, 0.0, &mut re);
        gemm(m, w, self.bins, 1.0, &frames, false, &self.sin_basis, true, 0.0, &mut im);
        let power = re.iter().zip(&im).map(|(a, b)| a * a + b * b).collect();
        Matrix::from_vec(m, self.bins, power)
    }

    /// Linear band energies, `25 x m`.
    pub fn band_energies(&self, signal: &AudioSignal) -> Result<Matrix> {
        let power = self.power_spectrum(signal)?;
        let m = power.rows();
        let mut energies = Matrix::zeros(BANDS, m);
        for t in 0..m {
            for (k, &p) in power.row(t).iter().enumerate() {
                if let Some(b) = self.bin_band[k] {
                    let e = energies.get(b, t);
                    energies.set(b, t, e + p);
                }
            }
        }
        Ok(energies)
    }

    pub fn analyze(&self, signal: &AudioSignal) -> Result<AudioFeatures> {
        let mut data = self.band_energies(signal)?;
        let peak = data.as_slice().iter().copied().fold(0.0, f64::max);
        if peak <= 0.0 {
            // digital silence has no anchor; pin everything to the floor
            data.map_inplace(|_| FLOOR_DB);
        } else {
            let peak_db = 10.0 * libm::log10(peak + LOG_EPSILON);
            data.map_inplace(|e| (10.0 * libm::log10(e + LOG_EPSILON) - peak_db).max(FLOOR_DB));
        }
        Ok(AudioFeatures {
            data,
            band_centers: self.centers.clone(),
        })
    }
}

/// Computes the normalized 25-band spectrogram of a signal.
pub fn spectrogram(signal: &AudioSignal) -> Result<AudioFeatures> {
    SpectrogramAnalyzer::new(signal.sample_rate())?.analyze(signal)
}

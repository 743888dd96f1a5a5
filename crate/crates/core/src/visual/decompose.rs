//! Two-scale, six-orientation bandpass decomposition of a luma frame.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

pub const ORIENTATIONS: usize = 6;
pub const SCALES: usize = 2;
pub const KERNEL_SIZE: usize = 13;
const RADIUS: usize = KERNEL_SIZE / 2;
/// Center frequency at scale 1, in cycles per pixel.
pub const CENTER_FREQUENCY: f64 = 0.25;
/// Gaussian envelope width in pixels.
const ENVELOPE_SIGMA: f64 = 3.5;
pub const MIN_FRAME_SIDE: usize = 32;

/// Single-channel `f32` image.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

impl Plane {
    pub fn from_luma(luma: &[u8], width: usize, height: usize) -> Self {
        debug_assert_eq!(luma.len(), width * height);
        Self {
            width,
            height,
            data: luma.iter().map(|&p| p as f32).collect(),
        }
    }

    fn mean(&self) -> f32 {
        let sum: f64 = self.data.iter().map(|&v| v as f64).sum();
        (sum / self.data.len() as f64) as f32
    }

    /// 2x2 block average; odd trailing rows/columns are dropped.
    pub fn downsample2(&self) -> Plane {
        let (w, h) = (self.width / 2, self.height / 2);
        let mut data = Vec::with_capacity(w * h);
        for y in 0..h {
            let r0 = &self.data[2 * y * self.width..];
            let r1 = &self.data[(2 * y + 1) * self.width..];
            for x in 0..w {
                data.push(0.25 * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]));
            }
        }
        Plane {
            width: w,
            height: h,
            data,
        }
    }

    /// Nearest-neighbour 2x upsampling to `width x height`; positions past
    /// the source edge repeat the last block.
    pub fn upsample2_to(&self, width: usize, height: usize) -> Plane {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            let sy = (y / 2).min(self.height - 1);
            let row = &self.data[sy * self.width..(sy + 1) * self.width];
            data.extend((0..width).map(|x| row[(x / 2).min(self.width - 1)]));
        }
        Plane { width, height, data }
    }
}

/// Bandpass coefficients of one frame.
#[derive(Debug, Clone)]
pub struct Subbands {
    /// `bands[scale][orientation]`; scale 1 is full resolution, scale 2 is
    /// computed on the 2x downsampled frame.
    pub bands: [[Plane; ORIENTATIONS]; SCALES],
    /// Frame minus its 2x low-pass reconstruction.
    pub residual: Plane,
}

/// Six zero-mean, unit-norm cosine Gabor kernels at 0°, 30°, ..., 150°.
///
/// The orientation is the direction of modulation, so horizontal stripes
/// (varying along y) excite the 90° kernel.
#[derive(Debug, Clone)]
pub struct OrientedFilterBank {
    kernels: [[f32; KERNEL_SIZE * KERNEL_SIZE]; ORIENTATIONS],
}

impl Default for OrientedFilterBank {
    fn default() -> Self {
        Self::new()
    }
}

impl OrientedFilterBank {
    pub fn new() -> Self {
        let mut kernels = [[0f32; KERNEL_SIZE * KERNEL_SIZE]; ORIENTATIONS];
        for (o, kernel) in kernels.iter_mut().enumerate() {
            let theta = orientation_radians(o);
            let (s, c) = (libm::sin(theta), libm::cos(theta));
            let mut k = [0f64; KERNEL_SIZE * KERNEL_SIZE];
            for ky in 0..KERNEL_SIZE {
                for kx in 0..KERNEL_SIZE {
                    let (x, y) = (kx as f64 - RADIUS as f64, ky as f64 - RADIUS as f64);
                    let envelope = libm::exp(-(x * x + y * y) / (2.0 * ENVELOPE_SIGMA * ENVELOPE_SIGMA));
                    let phase = 2.0 * core::f64::consts::PI * CENTER_FREQUENCY * (x * c + y * s);
                    k[ky * KERNEL_SIZE + kx] = envelope * libm::cos(phase);
                }
            }
            let mean = k.iter().sum::<f64>() / k.len() as f64;
            k.iter_mut().for_each(|v| *v -= mean);
            let norm = libm::sqrt(k.iter().map(|v| v * v).sum::<f64>());
            for (dst, v) in kernel.iter_mut().zip(k) {
                *dst = (v / norm) as f32;
            }
        }
        Self { kernels }
    }

    pub fn kernel(&self, orientation: usize) -> &[f32; KERNEL_SIZE * KERNEL_SIZE] {
        &self.kernels[orientation]
    }

    /// Filters `plane` with every orientation. The plane mean is removed
    /// first, so a constant plane yields exact zeros.
    pub fn filter_all(&self, plane: &Plane) -> [Plane; ORIENTATIONS] {
        let padded = pad_symmetric(plane, plane.mean());
        core::array::from_fn(|o| convolve_padded(&padded, plane.width, plane.height, &self.kernels[o]))
    }

    pub fn decompose(&self, luma: &[u8], width: usize, height: usize) -> Result<Subbands> {
        if width < MIN_FRAME_SIDE || height < MIN_FRAME_SIDE {
            return Err(Error::FrameTooSmall { width, height });
        }
        let full = Plane::from_luma(luma, width, height);
        let half = full.downsample2();
        let low = half.upsample2_to(width, height);
        let residual = Plane {
            width,
            height,
            data: full.data.iter().zip(&low.data).map(|(a, b)| a - b).collect(),
        };
        Ok(Subbands {
            bands: [self.filter_all(&full), self.filter_all(&half)],
            residual,
        })
    }
}

pub fn orientation_radians(o: usize) -> f64 {
    (o as f64) * core::f64::consts::PI / ORIENTATIONS as f64
}

/// Decomposes a frame with the default filter bank.
pub fn oriented_decompose(luma: &[u8], width: usize, height: usize) -> Result<Subbands> {
    OrientedFilterBank::new().decompose(luma, width, height)
}

/// Half-sample symmetric padding by the kernel radius, with `offset`
/// subtracted from every sample.
fn pad_symmetric(plane: &Plane, offset: f32) -> Plane {
    let (w, h) = (plane.width, plane.height);
    let (pw, ph) = (w + 2 * RADIUS, h + 2 * RADIUS);
    let reflect = |i: isize, n: usize| -> usize {
        let n = n as isize;
        let mut i = i;
        if i < 0 {
            i = -i - 1;
        }
        if i >= n {
            i = 2 * n - i - 1;
        }
        i as usize
    };
    let mut data = vec![0f32; pw * ph];
    for py in 0..ph {
        let sy = reflect(py as isize - RADIUS as isize, h);
        let src = &plane.data[sy * w..(sy + 1) * w];
        let dst = &mut data[py * pw..(py + 1) * pw];
        for (px, d) in dst.iter_mut().enumerate() {
            *d = src[reflect(px as isize - RADIUS as isize, w)] - offset;
        }
    }
    Plane {
        width: pw,
        height: ph,
        data,
    }
}

fn convolve_padded(padded: &Plane, width: usize, height: usize, kernel: &[f32; KERNEL_SIZE * KERNEL_SIZE]) -> Plane {
    let pw = padded.width;
    let mut out = vec![0f32; width * height];
    for y in 0..height {
        let dst = &mut out[y * width..(y + 1) * width];
        for ky in 0..KERNEL_SIZE {
            let src_row = &padded.data[(y + ky) * pw..(y + ky + 1) * pw];
            for kx in 0..KERNEL_SIZE {
                let k = kernel[ky * KERNEL_SIZE + kx];
                let src = &src_row[kx..kx + width];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += k * s;
                }
            }
        }
    }
    Plane {
        width,
        height,
        data: out,
    }
}

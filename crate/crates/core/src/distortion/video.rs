use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{DistortionKind, DistortionSpec, VideoDistortion};
use crate::media::FrameSequence;
use crate::{Error, Result};

/// Side of the square blocks dropped by block loss.
pub const BLOCK_SIZE: usize = 16;
const NOISE_SIGMA_AT_FULL: f64 = 40.0;
const BLUR_RADIUS_AT_FULL: f64 = 4.0;
const GRAY: u8 = 128;

/// Applies a video impairment; `seed` drives the random ones (noise,
/// block loss).
pub fn degrade_video(frames: &FrameSequence, spec: &DistortionSpec, seed: u64) -> Result<FrameSequence> {
    let DistortionKind::Video(kind) = spec.kind else {
        return Err(Error::UnknownKind(alloc::format!("{} is not a video distortion", spec.kind)));
    };
    let sev = DistortionSpec::new(spec.kind, spec.severity)?.severity;
    if sev == 0.0 {
        return Ok(frames.clone());
    }
    let (w, h) = (frames.width(), frames.height());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let out: Vec<Vec<u8>> = match kind {
        VideoDistortion::Noise => {
            let normal = Normal::new(0.0, NOISE_SIGMA_AT_FULL * sev).expect("finite sigma");
            frames
                .frames()
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|&p| libm::round((p as f64 + normal.sample(&mut rng)).clamp(0.0, 255.0)) as u8)
                        .collect()
                })
                .collect()
        }
        VideoDistortion::Blur => {
            let r = libm::round(BLUR_RADIUS_AT_FULL * sev) as usize;
            frames.frames().iter().map(|f| box_blur(f, w, h, r)).collect()
        }
        VideoDistortion::Freeze => {
            let n = frames.len();
            let dup = frozen_positions(n, sev);
            let mut out: Vec<Vec<u8>> = Vec::with_capacity(n);
            for (i, f) in frames.frames().iter().enumerate() {
                let next = if dup[i] { out[i - 1].clone() } else { f.clone() };
                out.push(next);
            }
            out
        }
        VideoDistortion::BlockLoss => {
            let (bw, bh) = (w.div_ceil(BLOCK_SIZE), h.div_ceil(BLOCK_SIZE));
            let blocks = bw * bh;
            let lost = (libm::round(sev * blocks as f64) as usize).min(blocks);
            let mut out: Vec<Vec<u8>> = Vec::with_capacity(frames.len());
            for f in frames.frames() {
                let mut frame = f.clone();
                for b in sample(&mut rng, blocks, lost).into_iter() {
                    let (x0, y0) = ((b % bw) * BLOCK_SIZE, (b / bw) * BLOCK_SIZE);
                    for y in y0..(y0 + BLOCK_SIZE).min(h) {
                        let row = y * w + x0..y * w + (x0 + BLOCK_SIZE).min(w);
                        match out.last() {
                            Some(prev) => frame[row.clone()].copy_from_slice(&prev[row]),
                            None => frame[row].fill(GRAY),
                        }
                    }
                }
                out.push(frame);
            }
            out
        }
    };
    frames.with_frames(out)
}

/// Which frames repeat their predecessor: `round(sev * n)` positions (at
/// most `n - 1`) spread evenly over frames `1..n`.
pub(crate) fn frozen_positions(n: usize, sev: f64) -> Vec<bool> {
    let mut dup = vec![false; n];
    if n < 2 {
        return dup;
    }
    let d = (libm::round(sev * n as f64) as usize).min(n - 1);
    for k in 0..d {
        dup[1 + k * (n - 1) / d] = true;
    }
    dup
}

/// Separable box blur with replicated borders and rounding.
fn box_blur(src: &[u8], w: usize, h: usize, r: usize) -> Vec<u8> {
    if r == 0 {
        return src.to_vec();
    }
    let clampi = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;
    let taps = (2 * r + 1) as u32;
    let mut tmp = vec![0u32; w * h];
    for y in 0..h {
        for x in 0..w {
            tmp[y * w + x] = (-(r as isize)..=r as isize)
                .map(|d| src[y * w + clampi(x as isize + d, w)] as u32)
                .sum();
        }
    }
    let norm = taps * taps;
    let mut out = vec![0u8; w * h];
    for y in 0..h {
        for x in 0..w {
            let s: u32 = (-(r as isize)..=r as isize).map(|d| tmp[clampi(y as isize + d, h) * w + x]).sum();
            out[y * w + x] = ((s + norm / 2) / norm) as u8;
        }
    }
    out
}

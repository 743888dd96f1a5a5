//! Spatial and temporal information per frame.

use alloc::vec::Vec;

use crate::media::FrameSequence;

/// Population standard deviation of the 3x3 Sobel gradient magnitude over
/// interior pixels (the 1-pixel border is excluded).
pub fn spatial_information(luma: &[u8], width: usize, height: usize) -> f64 {
    if width < 3 || height < 3 {
        return 0.0;
    }
    let p = |x: usize, y: usize| luma[y * width + x] as f64;
    let mut mags = Vec::with_capacity((width - 2) * (height - 2));
    for y in 1..height - 1 {
        for x in 1..width - 1 {
            let gx = (p(x + 1, y - 1) + 2.0 * p(x + 1, y) + p(x + 1, y + 1))
                - (p(x - 1, y - 1) + 2.0 * p(x - 1, y) + p(x - 1, y + 1));
            let gy = (p(x - 1, y + 1) + 2.0 * p(x, y + 1) + p(x + 1, y + 1))
                - (p(x - 1, y - 1) + 2.0 * p(x, y - 1) + p(x + 1, y - 1));
            mags.push(libm::sqrt(gx * gx + gy * gy));
        }
    }
    population_std(&mags)
}

/// Population standard deviation of the pixelwise difference `cur - prev`.
pub fn temporal_information(cur: &[u8], prev: &[u8]) -> f64 {
    let diffs: Vec<f64> = cur.iter().zip(prev).map(|(&a, &b)| a as f64 - b as f64).collect();
    population_std(&diffs)
}

fn population_std(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    libm::sqrt(var)
}

/// `[SI row, TI row]`, one column per frame. TI of the first frame is 0.
pub fn si_ti(frames: &FrameSequence) -> [Vec<f64>; 2] {
    let (w, h) = (frames.width(), frames.height());
    let f = frames.frames();
    let si = f.iter().map(|luma| spatial_information(luma, w, h)).collect();
    let ti = core::iter::once(0.0)
        .chain(f.windows(2).map(|pair| temporal_information(&pair[1], &pair[0])))
        .collect();
    [si, ti]
}

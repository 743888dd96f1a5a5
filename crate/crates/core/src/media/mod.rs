//! In-memory media: luma frame sequences and mono PCM signals, plus the
//! YUV4MPEG2 and RIFF/WAVE codecs that produce them from raw bytes.

mod wav;
mod y4m;

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

pub use wav::{parse_wav, write_wav};
pub use y4m::{parse_y4m, write_y4m};

/// A luma plane: 8-bit grayscale, row-major.
pub type LumaPlane = Vec<u8>;

/// Decoded video: equally sized luma planes and a rational frame rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSequence {
    width: usize,
    height: usize,
    fps_num: u32,
    fps_den: u32,
    frames: Vec<LumaPlane>,
}

impl FrameSequence {
    pub fn new(width: usize, height: usize, fps_num: u32, fps_den: u32, frames: Vec<LumaPlane>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidMedia(format!("zero-sized frame {width}x{height}")));
        }
        if fps_num == 0 || fps_den == 0 {
            return Err(Error::InvalidMedia(format!("invalid frame rate {fps_num}:{fps_den}")));
        }
        if frames.is_empty() {
            return Err(Error::InvalidMedia("sequence has no frames".into()));
        }
        if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| f.len() != width * height) {
            return Err(Error::InvalidMedia(format!(
                "frame {i} has {} pixels, expected {}",
                f.len(),
                width * height
            )));
        }
        Ok(Self {
            width,
            height,
            fps_num,
            fps_den,
            frames,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn fps(&self) -> f64 {
        self.fps_num as f64 / self.fps_den as f64
    }

    pub fn fps_rational(&self) -> (u32, u32) {
        (self.fps_num, self.fps_den)
    }

    pub fn frames(&self) -> &[LumaPlane] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    /// Always false; a sequence holds at least one frame.
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn into_frames(self) -> Vec<LumaPlane> {
        self.frames
    }

    /// Same geometry and rate, different frames.
    pub fn with_frames(&self, frames: Vec<LumaPlane>) -> Result<Self> {
        Self::new(self.width, self.height, self.fps_num, self.fps_den, frames)
    }
}

/// Mono PCM with amplitudes in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioSignal {
    sample_rate: u32,
    samples: Vec<f64>,
}

impl AudioSignal {
    pub fn new(sample_rate: u32, samples: Vec<f64>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidMedia("sample rate must be positive".into()));
        }
        if samples.is_empty() {
            return Err(Error::EmptyData);
        }
        if let Some(v) = samples.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::InvalidMedia(format!("sample {v} outside [-1, 1]")));
        }
        Ok(Self { sample_rate, samples })
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate as f64
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

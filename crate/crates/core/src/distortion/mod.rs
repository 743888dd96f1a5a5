//! Synthetic degradations with pseudo opinion scores.
//!
//! Four video impairments (additive noise, box blur, frame freezing, block
//! loss) and four audio impairments (background noise, chop, hard clipping,
//! echo) are each controlled by a severity in `[0, 1]`; severity 0 is the
//! identity. [`synth`] combines them with procedural source content into a
//! labelled corpus whose scores follow [`pseudo_mos`].

mod audio;
pub mod synth;
mod video;

use core::fmt;
use core::str::FromStr;

use alloc::string::ToString;

use crate::{Error, Result};

pub use audio::{degrade_audio, CHOP_SEGMENT_SECONDS};
pub use video::{degrade_video, BLOCK_SIZE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VideoDistortion {
    Noise,
    Blur,
    Freeze,
    BlockLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AudioDistortion {
    BackgroundNoise,
    Chop,
    Clip,
    Echo,
}

impl VideoDistortion {
    pub const ALL: [Self; 4] = [Self::Noise, Self::Blur, Self::Freeze, Self::BlockLoss];

    pub fn name(self) -> &'static str {
        match self {
            Self::Noise => "noise",
            Self::Blur => "blur",
            Self::Freeze => "freeze",
            Self::BlockLoss => "blockloss",
        }
    }
}

impl AudioDistortion {
    pub const ALL: [Self; 4] = [Self::BackgroundNoise, Self::Chop, Self::Clip, Self::Echo];

    pub fn name(self) -> &'static str {
        match self {
            Self::BackgroundNoise => "background_noise",
            Self::Chop => "chop",
            Self::Clip => "clip",
            Self::Echo => "echo",
        }
    }
}

/// Any supported impairment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DistortionKind {
    Video(VideoDistortion),
    Audio(AudioDistortion),
}

impl DistortionKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Video(v) => v.name(),
            Self::Audio(a) => a.name(),
        }
    }
}

impl fmt::Display for DistortionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistortionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        VideoDistortion::ALL
            .iter()
            .map(|&v| Self::Video(v))
            .chain(AudioDistortion::ALL.iter().map(|&a| Self::Audio(a)))
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownKind(s.to_string()))
    }
}

/// An impairment and its strength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionSpec {
    pub kind: DistortionKind,
    pub severity: f64,
}

impl DistortionSpec {
    pub fn new(kind: DistortionKind, severity: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&severity) {
            return Err(Error::SeverityOutOfRange(severity));
        }
        Ok(Self { kind, severity })
    }

    pub fn video(kind: VideoDistortion, severity: f64) -> Result<Self> {
        Self::new(DistortionKind::Video(kind), severity)
    }

    pub fn audio(kind: AudioDistortion, severity: f64) -> Result<Self> {
        Self::new(DistortionKind::Audio(kind), severity)
    }
}

/// Combined severity of independent video and audio impairments.
pub fn combined_severity(video: f64, audio: f64) -> f64 {
    1.0 - (1.0 - video) * (1.0 - audio)
}

/// Surrogate opinion score: 5 for a pristine clip, falling linearly to 1 as
/// the combined severity reaches 1.
pub fn pseudo_mos(video_severity: f64, audio_severity: f64) -> f64 {
    (5.0 - 4.0 * combined_severity(video_severity, audio_severity)).clamp(1.0, 5.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for v in VideoDistortion::ALL {
            assert_eq!(v.name().parse::<DistortionKind>().unwrap(), DistortionKind::Video(v));
        }
        for a in AudioDistortion::ALL {
            assert_eq!(a.name().parse::<DistortionKind>().unwrap(), DistortionKind::Audio(a));
        }
        assert!(matches!("jpeg".parse::<DistortionKind>(), Err(Error::UnknownKind(_))));
    }

    #[test]
    fn severity_is_validated() {
        assert!(DistortionSpec::video(VideoDistortion::Blur, 1.5).is_err());
        assert!(DistortionSpec::video(VideoDistortion::Blur, f64::NAN).is_err());
        assert!(DistortionSpec::audio(AudioDistortion::Echo, 0.0).is_ok());
    }

    #[test]
    fn pseudo_mos_endpoints() {
        assert_eq!(pseudo_mos(0.0, 0.0), 5.0);
        assert_eq!(pseudo_mos(1.0, 0.3), 1.0);
        assert_eq!(pseudo_mos(0.2, 1.0), 1.0);
        assert!((pseudo_mos(0.5, 0.5) - 2.0).abs() < 1e-15);
    }
}

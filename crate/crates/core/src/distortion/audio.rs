use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{AudioDistortion, DistortionKind, DistortionSpec};
use crate::media::AudioSignal;
use crate::{Error, Result};

/// Length of one chop segment.
pub const CHOP_SEGMENT_SECONDS: f64 = 0.020;

/// Applies an audio impairment; `seed` drives background noise. Outputs
/// are clamped to `[-1, 1]`.
pub fn degrade_audio(signal: &AudioSignal, spec: &DistortionSpec, seed: u64) -> Result<AudioSignal> {
    let DistortionKind::Audio(kind) = spec.kind else {
        return Err(Error::UnknownKind(alloc::format!("{} is not an audio distortion", spec.kind)));
    };
    let sev = DistortionSpec::new(spec.kind, spec.severity)?.severity;
    if sev == 0.0 {
        return Ok(signal.clone());
    }
    let fs = signal.sample_rate() as f64;
    let x = signal.samples();
    let y: Vec<f64> = match kind {
        AudioDistortion::BackgroundNoise => {
            let power = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
            let snr_db = 40.0 - 35.0 * sev;
            let sigma = libm::sqrt(power / libm::pow(10.0, snr_db / 10.0));
            if sigma > 0.0 {
                let normal = Normal::new(0.0, sigma).expect("finite sigma");
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                x.iter().map(|v| (v + normal.sample(&mut rng)).clamp(-1.0, 1.0)).collect()
            } else {
                x.to_vec()
            }
        }
        AudioDistortion::Chop => {
            let seg = (libm::round(CHOP_SEGMENT_SECONDS * fs) as usize).max(1);
            let dropped = |s: usize| libm::floor((s + 1) as f64 * sev) > libm::floor(s as f64 * sev);
            x.iter()
                .enumerate()
                .map(|(i, &v)| if dropped(i / seg) { 0.0 } else { v })
                .collect()
        }
        AudioDistortion::Clip => {
            let t = 1.0 - 0.9 * sev;
            x.iter().map(|v| v.clamp(-t, t)).collect()
        }
        AudioDistortion::Echo => {
            let delay = libm::round((0.100 + 0.200 * sev) * fs) as usize;
            let gain = 0.8 * sev;
            (0..x.len())
                .map(|i| {
                    let echo = if i >= delay { gain * x[i - delay] } else { 0.0 };
                    (x[i] + echo).clamp(-1.0, 1.0)
                })
                .collect()
        }
    };
    AudioSignal::new(signal.sample_rate(), y)
}

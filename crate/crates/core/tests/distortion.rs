use avq_core::audio::spectrogram;
use avq_core::distortion::synth::{synth_clip, SynthConfig};
use avq_core::distortion::{
    degrade_audio, degrade_video, pseudo_mos, AudioDistortion, DistortionSpec, VideoDistortion,
};
use avq_core::media::{parse_wav, parse_y4m, write_wav, write_y4m, AudioSignal, FrameSequence};
use avq_core::visual::{si_ti, visual_features, SI_ROW};
use proptest::prelude::*;

fn cfg() -> SynthConfig {
    SynthConfig {
        width: 64,
        height: 48,
        fps: 8,
        duration_secs: 1.25,
        sample_rate: 8000,
    }
}

fn tone(len: usize, fs: u32) -> AudioSignal {
    let x = (0..len)
        .map(|i| 0.1 * (2.0 * std::f64::consts::PI * 440.0 * i as f64 / fs as f64).sin())
        .collect();
    AudioSignal::new(fs, x).unwrap()
}

#[test]
fn zero_severity_is_the_identity() {
    let clip = synth_clip(1, 2, &cfg()).unwrap();
    for kind in VideoDistortion::ALL {
        let spec = DistortionSpec::video(kind, 0.0).unwrap();
        assert_eq!(degrade_video(&clip.video, &spec, 9).unwrap(), clip.video, "{}", kind.name());
    }
    for kind in AudioDistortion::ALL {
        let spec = DistortionSpec::audio(kind, 0.0).unwrap();
        assert_eq!(degrade_audio(&clip.audio, &spec, 9).unwrap(), clip.audio, "{}", kind.name());
    }
}

#[test]
fn full_noise_has_sigma_forty_on_mid_gray() {
    let frames = vec![vec![128u8; 64 * 64]; 10];
    let seq = FrameSequence::new(64, 64, 8, 1, frames).unwrap();
    let spec = DistortionSpec::video(VideoDistortion::Noise, 1.0).unwrap();
    let out = degrade_video(&seq, &spec, 4).unwrap();
    let diffs: Vec<f64> = out.frames().iter().flatten().map(|&p| p as f64 - 128.0).collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert!((sd - 40.0).abs() <= 0.15 * 40.0, "sd {sd}");
}

#[test]
fn background_noise_hits_the_target_snr() {
    // 40 - 35 * sev = 20 dB
    let sev = 4.0 / 7.0;
    let x = tone(16_000, 16_000);
    let spec = DistortionSpec::audio(AudioDistortion::BackgroundNoise, sev).unwrap();
    let y = degrade_audio(&x, &spec, 5).unwrap();
    let signal: f64 = x.samples().iter().map(|v| v * v).sum();
    let noise: f64 = x.samples().iter().zip(y.samples()).map(|(a, b)| (b - a) * (b - a)).sum();
    let snr = 10.0 * (signal / noise).log10();
    assert!((snr - 20.0).abs() <= 0.5, "snr {snr}");
}

#[test]
fn echo_of_an_impulse() {
    let mut x = vec![0.0; 8000];
    x[0] = 0.5;
    let x = AudioSignal::new(8000, x).unwrap();
    let sev = 0.5;
    let y = degrade_audio(&x, &DistortionSpec::audio(AudioDistortion::Echo, sev).unwrap(), 0).unwrap();
    let nonzero: Vec<(usize, f64)> = y
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(i, &v)| (i, v))
        .collect();
    let delay = ((0.1 + 0.2 * sev) * 8000.0_f64).round() as usize;
    assert_eq!(nonzero, vec![(0, 0.5), (delay, 0.5 * 0.8 * sev)]);
}

#[test]
fn half_freeze_on_ten_frames() {
    let frames: Vec<Vec<u8>> = (0..10).map(|i| vec![i as u8 * 20; 32 * 32]).collect();
    let seq = FrameSequence::new(32, 32, 8, 1, frames).unwrap();
    let out = degrade_video(&seq, &DistortionSpec::video(VideoDistortion::Freeze, 0.5).unwrap(), 0).unwrap();
    let repeats = out.frames().windows(2).filter(|p| p[0] == p[1]).count();
    assert_eq!(repeats, 5);
    let [_, ti] = si_ti(&out);
    assert!(ti.iter().filter(|&&t| t == 0.0).count() >= 5);
}

#[test]
fn blur_lowers_mean_si_monotonically() {
    let clip = synth_clip(3, 0, &cfg()).unwrap();
    let mut last = f64::INFINITY;
    for sev in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let out = degrade_video(&clip.video, &DistortionSpec::video(VideoDistortion::Blur, sev).unwrap(), 0).unwrap();
        let features = visual_features(&out).unwrap();
        let si = features.data.row(SI_ROW);
        let mean = si.iter().sum::<f64>() / si.len() as f64;
        assert!(mean < last, "severity {sev}: {mean} !< {last}");
        last = mean;
    }
}

#[test]
fn background_noise_raises_the_band_floor() {
    let x = tone(16_000, 16_000);
    let mut last = f64::NEG_INFINITY;
    for sev in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let spec = DistortionSpec::audio(AudioDistortion::BackgroundNoise, sev).unwrap();
        let s = spectrogram(&degrade_audio(&x, &spec, 2).unwrap()).unwrap();
        let floor = (0..s.frames())
            .map(|t| s.data.column(t).iter().copied().fold(f64::INFINITY, f64::min))
            .sum::<f64>()
            / s.frames() as f64;
        assert!(floor > last, "severity {sev}: {floor} !> {last}");
        last = floor;
    }
}

#[test]
fn synthesis_is_deterministic_and_reparses() {
    let a = synth_clip(7, 5, &cfg()).unwrap();
    let b = synth_clip(7, 5, &cfg()).unwrap();
    assert_eq!(a.video, b.video);
    assert_eq!(a.audio, b.audio);
    assert_eq!(a.mos, b.mos);
    assert!((1.0..=5.0).contains(&a.mos));
    assert_eq!(parse_y4m(&write_y4m(&a.video)).unwrap(), a.video);
    let wav = parse_wav(&write_wav(&a.audio)).unwrap();
    assert_eq!(wav.len(), a.audio.len());
    assert!(wav.samples().iter().all(|v| (-1.0..=1.0).contains(v)));
    let err = wav
        .samples()
        .iter()
        .zip(a.audio.samples())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1.0 / 32768.0, "quantization error {err}");
}

proptest! {
    #[test]
    fn pseudo_mos_is_monotone(sv in 0.0f64..=1.0, sa in 0.0f64..=1.0, dv in 0.0f64..0.5, da in 0.0f64..0.5) {
        let base = pseudo_mos(sv, sa);
        prop_assert!((1.0..=5.0).contains(&base));
        prop_assert!(pseudo_mos((sv + dv).min(1.0), sa) <= base);
        prop_assert!(pseudo_mos(sv, (sa + da).min(1.0)) <= base);
    }
}

#[test]
fn pseudo_mos_endpoints() {
    assert_eq!(pseudo_mos(0.0, 0.0), 5.0);
    assert_eq!(pseudo_mos(1.0, 0.3), 1.0);
    assert_eq!(pseudo_mos(0.2, 1.0), 1.0);
}

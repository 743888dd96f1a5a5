use avq_core::distortion::synth::{source_video, SynthConfig};
use avq_core::media::FrameSequence;
use avq_core::visual::{
    fit_ggd, ggd_alpha_index, nss_features, oriented_decompose, spatial_information, visual_features, GgdTable,
    ORIENTATIONS, ORIENTATION_PAIR_RANGE, SCALES, SI_ROW, TI_ROW, VISUAL_ROWS,
};
use avq_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn clamp_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// A frame from the procedural texture generator used by the synthesizer.
fn natural_frame(seed: u64) -> (Vec<u8>, usize, usize) {
    let cfg = SynthConfig {
        width: 160,
        height: 120,
        fps: 8,
        duration_secs: 0.125,
        sample_rate: 16_000,
    };
    let video = source_video(&mut ChaCha8Rng::seed_from_u64(seed), &cfg).unwrap();
    (video.frames()[0].clone(), cfg.width, cfg.height)
}

#[test]
fn horizontal_grating_excites_the_ninety_degree_filters() {
    let (w, h) = (96, 96);
    let luma: Vec<u8> = (0..h)
        .flat_map(|y| {
            let v = 128.0 + 100.0 * (2.0 * std::f64::consts::PI * 0.25 * y as f64).sin();
            std::iter::repeat_n(clamp_u8(v), w)
        })
        .collect();
    let bands = oriented_decompose(&luma, w, h).unwrap();
    let energies: Vec<f64> = bands.bands[0]
        .iter()
        .map(|p| p.data.iter().map(|&v| (v as f64) * (v as f64)).sum())
        .collect();
    let best = (0..ORIENTATIONS)
        .max_by(|&a, &b| energies[a].total_cmp(&energies[b]))
        .unwrap();
    assert_eq!(best, 3, "energies by orientation: {energies:?}");
}

#[test]
fn small_frames_are_rejected() {
    assert!(matches!(
        oriented_decompose(&[0; 256], 16, 16),
        Err(Error::FrameTooSmall { .. })
    ));
}

#[test]
fn gaussian_samples_fit_shape_two() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let x: Vec<f64> = (0..100_000).map(|_| normal.sample(&mut rng)).collect();
    let fit = fit_ggd(&x).unwrap();
    assert!((fit.alpha - 2.0).abs() <= 0.1, "alpha {}", fit.alpha);
    assert!((fit.sigma - 1.0).abs() <= 0.05, "sigma {}", fit.sigma);
}

#[test]
fn laplacian_samples_fit_shape_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    // inverse-CDF sampling of a unit Laplacian
    let x: Vec<f64> = (0..100_000)
        .map(|_| {
            let u: f64 = rng.random_range(-0.5..0.5);
            -u.signum() * (1.0 - 2.0 * u.abs()).ln()
        })
        .collect();
    let fit = fit_ggd(&x).unwrap();
    assert!((fit.alpha - 1.0).abs() <= 0.1, "alpha {}", fit.alpha);
}

#[test]
fn zero_samples_are_degenerate() {
    assert!(matches!(fit_ggd(&[0.0; 1000]), Err(Error::DegenerateInput(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fitted_shape_is_a_local_grid_optimum(seed in any::<u64>(), shape in 0.3f64..4.0, n in 64usize..2000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| {
            let u: f64 = rng.random_range(-1.0..1.0);
            u.signum() * u.abs().powf(1.0 / shape)
        }).collect();
        let table = GgdTable::new();
        let fit = table.fit(&x).unwrap();
        prop_assert!((0.2..=10.0).contains(&fit.alpha));
        let m1 = x.iter().map(|v| v.abs()).sum::<f64>() / n as f64;
        let m2 = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let r = m2 / (m1 * m1);
        let i = table.best_index(r);
        let here = table.objective(i, r);
        if i > 0 {
            prop_assert!(here <= table.objective(i - 1, r));
        }
        if i + 1 < table.len() {
            prop_assert!(here <= table.objective(i + 1, r));
        }
    }

    #[test]
    fn nss_vectors_are_finite(seed in any::<u64>(), w in 32usize..80, h in 32usize..80) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let luma: Vec<u8> = (0..w * h).map(|_| rng.random()).collect();
        let f = nss_features(&luma, w, h).unwrap();
        prop_assert_eq!(f.values.len(), 88);
        prop_assert!(f.values.iter().all(|v| v.is_finite()));
    }
}

#[test]
fn white_noise_has_uncorrelated_orientation_pairs() {
    let (w, h) = (320, 240);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let normal = Normal::new(128.0, 30.0).unwrap();
    let luma: Vec<u8> = (0..w * h).map(|_| clamp_u8(normal.sample(&mut rng))).collect();
    let f = nss_features(&luma, w, h).unwrap();
    for (i, r) in f.values[ORIENTATION_PAIR_RANGE].iter().enumerate() {
        assert!(r.abs() < 0.1, "pair {i}: r = {r}");
    }
}

#[test]
fn additive_noise_gaussianizes_subbands() {
    let (clean, w, h) = natural_frame(11);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let normal = Normal::new(0.0, 20.0).unwrap();
    let noisy: Vec<u8> = clean
        .iter()
        .map(|&p| clamp_u8(p as f64 + normal.sample(&mut rng)))
        .collect();
    let a = nss_features(&clean, w, h).unwrap();
    let b = nss_features(&noisy, w, h).unwrap();
    let mut closer = 0;
    for s in 0..SCALES {
        for o in 0..ORIENTATIONS {
            let i = ggd_alpha_index(s, o);
            if (b.values[i] - 2.0).abs() < (a.values[i] - 2.0).abs() {
                closer += 1;
            }
        }
    }
    assert!(closer >= 10, "only {closer} of 12 subbands moved toward 2");
}

/// Independent Sobel/standard-deviation oracle written with explicit
/// kernels and a two-pass variance.
fn sobel_si_oracle(luma: &[u8], w: usize, h: usize) -> f64 {
    const KX: [[f64; 3]; 3] = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
    let mut mags = Vec::new();
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let (mut gx, mut gy) = (0.0, 0.0);
            for (dy, row) in KX.iter().enumerate() {
                for (dx, &k) in row.iter().enumerate() {
                    let p = luma[(y + dy - 1) * w + (x + dx - 1)] as f64;
                    gx += k * p;
                    // the vertical kernel is the transpose of the horizontal one
                    gy += KX[dx][dy] * p;
                }
            }
            mags.push((gx * gx + gy * gy).sqrt());
        }
    }
    let n = mags.len() as f64;
    let mean = mags.iter().sum::<f64>() / n;
    (mags.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / n).sqrt()
}

#[test]
fn checkerboard_si_matches_brute_force() {
    for (w, h, cell) in [(8, 8, 1), (8, 8, 2), (64, 48, 8)] {
        let luma: Vec<u8> = (0..h)
            .flat_map(|y| (0..w).map(move |x| if (x / cell + y / cell) % 2 == 0 { 0 } else { 255 }))
            .collect();
        let si = spatial_information(&luma, w, h);
        let oracle = sobel_si_oracle(&luma, w, h);
        assert!((si - oracle).abs() <= 1e-9 * oracle.max(1.0), "{w}x{h}/{cell}: {si} vs {oracle}");
    }
}

fn smooth3(luma: &[u8], w: usize, h: usize) -> Vec<u8> {
    let mut out = vec![0u8; luma.len()];
    for y in 0..h {
        for x in 0..w {
            let mut sum = 0.0;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let yy = (y as i64 + dy).clamp(0, h as i64 - 1) as usize;
                    let xx = (x as i64 + dx).clamp(0, w as i64 - 1) as usize;
                    sum += luma[yy * w + xx] as f64;
                }
            }
            out[y * w + x] = clamp_u8(sum / 9.0);
        }
    }
    out
}

#[test]
fn si_row_falls_along_a_blur_ramp() {
    let (mut frame, w, h) = natural_frame(5);
    let mut frames = vec![frame.clone()];
    for _ in 0..4 {
        frame = smooth3(&frame, w, h);
        frames.push(frame.clone());
    }
    let seq = FrameSequence::new(w, h, 8, 1, frames).unwrap();
    let features = visual_features(&seq).unwrap();
    let si = features.data.row(SI_ROW);
    assert!(si.windows(2).all(|p| p[1] < p[0]), "SI row {si:?}");
}

#[test]
fn five_frames_give_ninety_by_five_and_frozen_clips_have_zero_ti() {
    let (frame, w, h) = natural_frame(6);
    let seq = FrameSequence::new(w, h, 8, 1, vec![frame; 5]).unwrap();
    let features = visual_features(&seq).unwrap();
    assert_eq!(features.data.shape(), (VISUAL_ROWS, 5));
    assert_eq!(VISUAL_ROWS, 90);
    assert!(features.data.is_finite());
    assert!(features.data.row(TI_ROW).iter().all(|&t| t == 0.0));
}

#[test]
fn extraction_is_deterministic() {
    let (a, w, h) = natural_frame(7);
    let (b, _, _) = natural_frame(8);
    let seq = FrameSequence::new(w, h, 8, 1, vec![a, b]).unwrap();
    assert_eq!(visual_features(&seq).unwrap(), visual_features(&seq).unwrap());
}

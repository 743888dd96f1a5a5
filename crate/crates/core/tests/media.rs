use avq_core::media::{parse_wav, parse_y4m, write_wav, write_y4m, AudioSignal, FrameSequence};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn y4m_round_trips(w in 1usize..24, h in 1usize..24, n in 1usize..4, num in 1u32..60, den in 1u32..3, seed in any::<u8>()) {
        let frames: Vec<Vec<u8>> = (0..n)
            .map(|f| (0..w * h).map(|i| (i as u8).wrapping_mul(31).wrapping_add(seed).wrapping_add(f as u8)).collect())
            .collect();
        let seq = FrameSequence::new(w, h, num, den, frames).unwrap();
        let parsed = parse_y4m(&write_y4m(&seq)).unwrap();
        prop_assert_eq!(parsed, seq);
    }

    #[test]
    fn wav_round_trips_within_quantization(samples in proptest::collection::vec(-1.0f64..1.0, 1..500), rate in 4000u32..48000) {
        let sig = AudioSignal::new(rate, samples).unwrap();
        let back = parse_wav(&write_wav(&sig)).unwrap();
        prop_assert_eq!(back.sample_rate(), rate);
        prop_assert_eq!(back.len(), sig.len());
        for (a, b) in back.samples().iter().zip(sig.samples()) {
            prop_assert!((a - b).abs() <= 1.0 / 32768.0);
            prop_assert!((-1.0..=1.0).contains(a));
        }
    }
}

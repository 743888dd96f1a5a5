//! RIFF/WAVE PCM-16 reader and writer.

use alloc::format;
use alloc::vec::Vec;

use super::AudioSignal;
use crate::{Error, Result};

const FORMAT_PCM: u16 = 1;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

struct Fmt {
    channels: u16,
    sample_rate: u32,
}

fn parse_fmt(body: &[u8]) -> Result<Fmt> {
    if body.len() < 16 {
        return Err(Error::MalformedRiff("fmt chunk shorter than 16 bytes".into()));
    }
    let mut tag = u16_at(body, 0);
    if tag == FORMAT_EXTENSIBLE {
        // The sub-format GUID starts with the real format tag.
        if body.len() < 26 {
            return Err(Error::MalformedRiff("truncated WAVE_FORMAT_EXTENSIBLE block".into()));
        }
        tag = u16_at(body, 24);
    }
    if tag != FORMAT_PCM {
        return Err(Error::UnsupportedEncoding(format!("format tag {tag:#06x} is not PCM")));
    }
    let channels = u16_at(body, 2);
    let sample_rate = u32_at(body, 4);
    let bits = u16_at(body, 14);
    if bits != 16 {
        return Err(Error::UnsupportedEncoding(format!("{bits}-bit samples")));
    }
    if !(1..=2).contains(&channels) {
        return Err(Error::UnsupportedEncoding(format!("{channels} channels")));
    }
    if sample_rate == 0 {
        return Err(Error::MalformedRiff("zero sample rate".into()));
    }
    Ok(Fmt { channels, sample_rate })
}

/// Decodes 16-bit PCM, mono or stereo. Stereo is averaged per sample frame;
/// integers are scaled by 1/32768.
pub fn parse_wav(bytes: &[u8]) -> Result<AudioSignal> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(Error::MalformedRiff("missing RIFF/WAVE signature".into()));
    }
    let mut fmt = None;
    let mut data = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start.saturating_add(size);
        if id == b"data" {
            // Streamed writers sometimes leave the size unpatched; take what exists.
            data = Some(&bytes[body_start..body_end.min(bytes.len())]);
        } else {
            if body_end > bytes.len() {
                return Err(Error::MalformedRiff(format!(
                    "chunk `{}` overruns the file",
                    core::str::from_utf8(id).unwrap_or("????")
                )));
            }
            if id == b"fmt " {
                fmt = Some(parse_fmt(&bytes[body_start..body_end])?);
            }
        }
        pos = body_end.saturating_add(size & 1);
    }

    let fmt = fmt.ok_or_else(|| Error::MalformedRiff("no fmt chunk".into()))?;
    let data = data.ok_or_else(|| Error::MalformedRiff("no data chunk".into()))?;
    let frame_bytes = 2 * fmt.channels as usize;
    let frames = data.len() / frame_bytes;
    if frames == 0 {
        return Err(Error::EmptyData);
    }
    let samples = data[..frames * frame_bytes]
        .chunks_exact(frame_bytes)
        .map(|frame| {
            let sum: f64 = frame
                .chunks_exact(2)
                .map(|s| i16::from_le_bytes([s[0], s[1]]) as f64 / 32768.0)
                .sum();
            sum / fmt.channels as f64
        })
        .collect();
    AudioSignal::new(fmt.sample_rate, samples)
}

/// Encodes a signal as mono 16-bit PCM. Samples are scaled by 32768,
/// rounded and saturated to the `i16` range.
pub fn write_wav(signal: &AudioSignal) -> Vec<u8> {
    let data_len = signal.len() * 2;
    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&((36 + data_len) as u32).to_le_bytes());
    out.extend_from_slice(b"WAVEfmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&signal.sample_rate().to_le_bytes());
    out.extend_from_slice(&(signal.sample_rate() * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in signal.samples() {
        let q = libm::round(s * 32768.0).clamp(i16::MIN as f64, i16::MAX as f64) as i16;
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}

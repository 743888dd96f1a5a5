//! YUV4MPEG2 reader and writer. Only the luma plane is kept.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::FrameSequence;
use crate::{Error, Result};

const MAGIC: &[u8] = b"YUV4MPEG2";
const FRAME_TAG: &[u8] = b"FRAME";

#[derive(Clone, Copy)]
enum Chroma {
    Yuv420,
    Mono,
}

impl Chroma {
    fn from_tag(tag: &str) -> Result<Self> {
        match tag {
            "420" | "420jpeg" | "420paldv" | "420mpeg2" => Ok(Chroma::Yuv420),
            "mono" => Ok(Chroma::Mono),
            other => Err(Error::UnsupportedPixelFormat(other.to_string())),
        }
    }

    fn frame_bytes(self, w: usize, h: usize) -> usize {
        match self {
            Chroma::Yuv420 => w * h + 2 * w.div_ceil(2) * h.div_ceil(2),
            Chroma::Mono => w * h,
        }
    }
}

fn parse_rational(s: &str) -> Option<(u32, u32)> {
    let (n, d) = s.split_once(':')?;
    let n = n.parse().ok()?;
    let d = d.parse().ok()?;
    (n > 0 && d > 0).then_some((n, d))
}

fn line_end(bytes: &[u8], from: usize) -> Option<usize> {
    bytes[from..].iter().position(|&b| b == b'\n').map(|p| from + p)
}

/// Parses a YUV4MPEG2 stream into its luma planes.
///
/// `W`, `H`, `F` and `C` header tags are honored; others are ignored. A
/// missing `C` tag means 4:2:0.
pub fn parse_y4m(bytes: &[u8]) -> Result<FrameSequence> {
    let header_end = line_end(bytes, 0).ok_or_else(|| Error::MalformedHeader("no header line".into()))?;
    let header = core::str::from_utf8(&bytes[..header_end])
        .map_err(|_| Error::MalformedHeader("header is not ASCII".into()))?;
    let mut tokens = header.split(' ').filter(|t| !t.is_empty());
    if tokens.next().map(str::as_bytes) != Some(MAGIC) {
        return Err(Error::MalformedHeader("missing YUV4MPEG2 signature".into()));
    }

    let (mut width, mut height, mut fps, mut chroma) = (None, None, None, Chroma::Yuv420);
    for tok in tokens {
        let (tag, value) = tok.split_at(1);
        match tag {
            "W" => width = value.parse::<usize>().ok().filter(|&w| w > 0),
            "H" => height = value.parse::<usize>().ok().filter(|&h| h > 0),
            "F" => fps = parse_rational(value),
            "C" => chroma = Chroma::from_tag(value)?,
            _ => {}
        }
    }
    let width = width.ok_or_else(|| Error::MalformedHeader("missing or invalid W tag".into()))?;
    let height = height.ok_or_else(|| Error::MalformedHeader("missing or invalid H tag".into()))?;
    let (fps_num, fps_den) = fps.ok_or_else(|| Error::MalformedHeader("missing or invalid F tag".into()))?;

    let frame_len = chroma.frame_bytes(width, height);
    let luma_len = width * height;
    let mut frames = Vec::new();
    let mut pos = header_end + 1;
    while pos < bytes.len() {
        let idx = frames.len();
        let tag_end = line_end(bytes, pos).ok_or(Error::TruncatedFrame {
            frame: idx,
            expected: frame_len,
            found: 0,
        })?;
        if !bytes[pos..tag_end].starts_with(FRAME_TAG) {
            return Err(Error::MalformedHeader(format!("frame {idx} does not start with FRAME")));
        }
        let start = tag_end + 1;
        let available = bytes.len() - start;
        if available < frame_len {
            return Err(Error::TruncatedFrame {
                frame: idx,
                expected: frame_len,
                found: available,
            });
        }
        frames.push(bytes[start..start + luma_len].to_vec());
        pos = start + frame_len;
    }
    if frames.is_empty() {
        return Err(Error::MalformedHeader("stream contains no frames".into()));
    }
    FrameSequence::new(width, height, fps_num, fps_den, frames)
}

/// Serializes luma planes as 4:2:0 YUV4MPEG2 with neutral (128) chroma.
pub fn write_y4m(seq: &FrameSequence) -> Vec<u8> {
    let (w, h) = (seq.width(), seq.height());
    let (num, den) = seq.fps_rational();
    let chroma_len = 2 * w.div_ceil(2) * h.div_ceil(2);
    let header = format!("YUV4MPEG2 W{w} H{h} F{num}:{den} Ip A1:1 C420jpeg\n");
    let mut out = Vec::with_capacity(header.len() + seq.len() * (6 + w * h + chroma_len));
    out.extend_from_slice(header.as_bytes());
    for frame in seq.frames() {
        out.extend_from_slice(b"FRAME\n");
        out.extend_from_slice(frame);
        out.resize(out.len() + chroma_len, 128);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn mono_clip(w: usize, h: usize, frames: &[&[u8]]) -> Vec<u8> {
        let mut b = format!("YUV4MPEG2 W{w} H{h} F25:1 Cmono\n").into_bytes();
        for f in frames {
            b.extend_from_slice(b"FRAME\n");
            b.extend_from_slice(f);
        }
        b
    }

    #[test]
    fn mono_zero_payload() {
        let zeros = [0u8; 16];
        let seq = parse_y4m(&mono_clip(4, 4, &[&zeros, &zeros])).unwrap();
        assert_eq!((seq.width(), seq.height(), seq.len()), (4, 4, 2));
        assert!(seq.frames().iter().all(|f| f.iter().all(|&p| p == 0)));
    }

    #[test]
    fn header_fields() {
        let mut b = b"YUV4MPEG2 W8 H8 F30:1 C420\nFRAME\n".to_vec();
        b.extend((0..96).map(|i| i as u8));
        let seq = parse_y4m(&b).unwrap();
        assert_eq!(seq.fps(), 30.0);
        assert_eq!((seq.width(), seq.height()), (8, 8));
        assert_eq!(seq.frames()[0], (0..64).map(|i| i as u8).collect::<Vec<_>>());
    }

    #[test]
    fn unknown_tags_and_frame_params_are_ignored() {
        let mut b = b"YUV4MPEG2 W4 H4 F24000:1001 It A1:1 XYSCSS=420JPEG\nFRAME Ixyz\n".to_vec();
        b.extend(vec![7u8; 24]);
        let seq = parse_y4m(&b).unwrap();
        assert!((seq.fps() - 23.976).abs() < 1e-3);
        assert_eq!(seq.frames()[0], vec![7u8; 16]);
    }

    #[test]
    fn truncated_payload() {
        let zeros = [0u8; 16];
        let mut b = mono_clip(4, 4, &[&zeros]);
        b.extend_from_slice(b"FRAME\n");
        b.extend_from_slice(&[1, 2, 3]);
        assert_eq!(
            parse_y4m(&b),
            Err(Error::TruncatedFrame {
                frame: 1,
                expected: 16,
                found: 3
            })
        );
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_y4m(b"YUV4MPEG W4 H4 F1:1\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(parse_y4m(b"YUV4MPEG2 H4 F1:1\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(parse_y4m(b"YUV4MPEG2 W4 H4 F0:1\n"), Err(Error::MalformedHeader(_))));
        assert!(matches!(
            parse_y4m(b"YUV4MPEG2 W4 H4 F1:1 C444\n"),
            Err(Error::UnsupportedPixelFormat(_))
        ));
        assert!(matches!(
            parse_y4m(b"YUV4MPEG2 W4 H4 F1:1 C420p10\n"),
            Err(Error::UnsupportedPixelFormat(_))
        ));
    }

    #[test]
    fn odd_dimensions_round_up_chroma() {
        let seq = FrameSequence::new(5, 3, 8, 1, vec![vec![9; 15]]).unwrap();
        let bytes = write_y4m(&seq);
        // 15 luma + 2 * 3 * 2 chroma
        assert_eq!(bytes.len(), b"YUV4MPEG2 W5 H3 F8:1 Ip A1:1 C420jpeg\nFRAME\n".len() + 15 + 12);
        assert_eq!(parse_y4m(&bytes).unwrap(), seq);
    }
}

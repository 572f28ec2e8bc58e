//! RIFF/WAVE reading (PCM16, PCM24, float32; mono or stereo) and writing
//! (PCM16 or float32, mono).

use super::AudioBuffer;
use crate::{Error, Result};

const FORMAT_PCM: u16 = 1;
const FORMAT_IEEE_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Sample encoding used when writing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WavFormat {
    Pcm16,
    #[default]
    Float32,
}

struct FmtChunk {
    format: u16,
    channels: u16,
    sample_rate: u32,
    block_align: u16,
    bits: u16,
}

fn decode_err(chunk: &'static str, reason: impl Into<String>) -> Error {
    Error::Decode {
        chunk,
        reason: reason.into(),
    }
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

fn parse_fmt(body: &[u8]) -> Result<FmtChunk> {
    if body.len() < 16 {
        return Err(decode_err(
            "fmt ",
            format!("{} bytes, need at least 16", body.len()),
        ));
    }
    let mut format = u16_at(body, 0);
    let channels = u16_at(body, 2);
    let sample_rate = u32_at(body, 4);
    let block_align = u16_at(body, 12);
    let bits = u16_at(body, 14);
    if format == FORMAT_EXTENSIBLE {
        // cbSize(2) validBits(2) channelMask(4) then the subformat GUID,
        // whose first two bytes carry the plain format tag.
        if body.len() < 26 {
            return Err(decode_err("fmt ", "extensible header truncated"));
        }
        format = u16_at(body, 24);
    }
    if sample_rate == 0 {
        return Err(decode_err("fmt ", "sample rate is zero"));
    }
    if channels == 0 {
        return Err(decode_err("fmt ", "channel count is zero"));
    }
    Ok(FmtChunk {
        format,
        channels,
        sample_rate,
        block_align,
        bits,
    })
}

/// Decode a WAV file into a mono buffer. Integer samples are scaled by
/// `1 / 2^(bits-1)`; stereo is averaged sample-wise.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioBuffer> {
    if bytes.len() < 12 {
        return Err(decode_err("RIFF", "file shorter than the 12-byte header"));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(decode_err("RIFF", "missing RIFF tag"));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(decode_err("RIFF", "missing WAVE form type"));
    }

    let mut fmt = None;
    let mut data = None;
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = u32_at(bytes, pos + 4) as usize;
        let body_start = pos + 8;
        let body_end = body_start.saturating_add(size);
        match id {
            b"fmt " => {
                if body_end > bytes.len() {
                    return Err(decode_err("fmt ", "chunk extends past end of file"));
                }
                fmt = Some(parse_fmt(&bytes[body_start..body_end])?);
            }
            b"data" => {
                // Tolerate writers that leave a bogus size in a truncated final chunk.
                let end = body_end.min(bytes.len());
                data = Some(&bytes[body_start..end]);
                if body_end > bytes.len() {
                    break;
                }
            }
            _ => {}
        }
        pos = body_end.saturating_add(size & 1);
    }

    let fmt = fmt.ok_or_else(|| decode_err("fmt ", "chunk not found"))?;
    let data = data.ok_or_else(|| decode_err("data", "chunk not found"))?;

    if fmt.channels > 2 {
        return Err(Error::UnsupportedFormat(format!(
            "{} channels",
            fmt.channels
        )));
    }
    let bytes_per_sample = match (fmt.format, fmt.bits) {
        (FORMAT_PCM, 16) => 2,
        (FORMAT_PCM, 24) => 3,
        (FORMAT_IEEE_FLOAT, 32) => 4,
        (f, b) => {
            return Err(Error::UnsupportedFormat(format!(
                "format tag {f}, {b} bits per sample"
            )))
        }
    };
    let channels = fmt.channels as usize;
    let frame_bytes = bytes_per_sample * channels;
    if fmt.block_align as usize != frame_bytes {
        return Err(decode_err(
            "fmt ",
            format!(
                "block align {} does not match {frame_bytes}",
                fmt.block_align
            ),
        ));
    }

    let read = |s: &[u8]| -> f64 {
        match bytes_per_sample {
            2 => i16::from_le_bytes([s[0], s[1]]) as f64 / 32_768.0,
            3 => {
                let v = i32::from_le_bytes([0, s[0], s[1], s[2]]) >> 8;
                v as f64 / 8_388_608.0
            }
            _ => f32::from_le_bytes([s[0], s[1], s[2], s[3]]) as f64,
        }
    };

    let n_frames = data.len() / frame_bytes;
    let mut samples = Vec::with_capacity(n_frames);
    for frame in data.chunks_exact(frame_bytes) {
        let sum: f64 = frame.chunks_exact(bytes_per_sample).map(read).sum();
        samples.push(sum / channels as f64);
    }
    if samples.iter().any(|s| !s.is_finite()) {
        return Err(decode_err("data", "non-finite float sample"));
    }
    AudioBuffer::new(samples, fmt.sample_rate)
}

/// Encode a mono buffer. PCM16 quantizes with `round(x * 32768)` clamped to
/// the i16 range.
pub fn encode_wav(buf: &AudioBuffer, format: WavFormat) -> Vec<u8> {
    let (tag, bits, fmt_len): (u16, u16, u32) = match format {
        WavFormat::Pcm16 => (FORMAT_PCM, 16, 16),
        WavFormat::Float32 => (FORMAT_IEEE_FLOAT, 32, 18),
    };
    let block_align = bits / 8;
    let data_len = (buf.len() * block_align as usize) as u32;
    let fact_len: u32 = if format == WavFormat::Float32 { 12 } else { 0 };
    let riff_len = 4 + (8 + fmt_len) + fact_len + 8 + data_len + (data_len & 1);

    let mut out = Vec::with_capacity(riff_len as usize + 8);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&riff_len.to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&fmt_len.to_le_bytes());
    out.extend_from_slice(&tag.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&buf.sample_rate_hz().to_le_bytes());
    out.extend_from_slice(&(buf.sample_rate_hz() * block_align as u32).to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&bits.to_le_bytes());
    if fmt_len == 18 {
        out.extend_from_slice(&0u16.to_le_bytes());
    }
    if fact_len > 0 {
        out.extend_from_slice(b"fact");
        out.extend_from_slice(&4u32.to_le_bytes());
        out.extend_from_slice(&(buf.len() as u32).to_le_bytes());
    }
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in buf.samples() {
        match format {
            WavFormat::Pcm16 => {
                let q = (s * 32_768.0).round().clamp(-32_768.0, 32_767.0) as i16;
                out.extend_from_slice(&q.to_le_bytes());
            }
            WavFormat::Float32 => out.extend_from_slice(&(s as f32).to_le_bytes()),
        }
    }
    if data_len & 1 == 1 {
        out.push(0);
    }
    out
}

//! RIFF/WAVE reading and writing: PCM 16/24/32 and IEEE float32,
//! little-endian throughout. Floats map to PCM by symmetric scaling with
//! 2^(bits-1), so integer payloads round-trip bit-exactly. Extensible
//! (0xFFFE) headers are accepted on read, never emitted.
//!
//! Writers require exclusive access per path; reads are freely
//! concurrent.

use std::fs;
use std::path::Path;

use specgate_core::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WavFormat {
    Pcm16,
    Pcm24,
    Pcm32,
    Float32,
}

impl WavFormat {
    pub fn bits(self) -> u16 {
        match self {
            WavFormat::Pcm16 => 16,
            WavFormat::Pcm24 => 24,
            WavFormat::Pcm32 => 32,
            WavFormat::Float32 => 32,
        }
    }

    fn format_tag(self) -> u16 {
        match self {
            WavFormat::Float32 => 3,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WavFormat::Pcm16 => "pcm16",
            WavFormat::Pcm24 => "pcm24",
            WavFormat::Pcm32 => "pcm32",
            WavFormat::Float32 => "float32",
        }
    }
}

impl std::str::FromStr for WavFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pcm16" => Ok(WavFormat::Pcm16),
            "pcm24" => Ok(WavFormat::Pcm24),
            "pcm32" => Ok(WavFormat::Pcm32),
            "float32" => Ok(WavFormat::Float32),
            other => Err(format!("unknown sample format '{other}'")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum WavError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed WAV: {0}")]
    Parse(String),
    #[error("unsupported WAV: {0}")]
    Unsupported(String),
}

fn parse_err(msg: &str) -> WavError {
    WavError::Parse(msg.into())
}

fn read_u16(bytes: &[u8], at: usize) -> Result<u16, WavError> {
    bytes
        .get(at..at + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| parse_err("truncated file"))
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32, WavError> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| parse_err("truncated file"))
}

struct FmtChunk {
    format: WavFormat,
    channels: usize,
    sample_rate: u32,
}

fn parse_fmt(bytes: &[u8]) -> Result<FmtChunk, WavError> {
    if bytes.len() < 16 {
        return Err(parse_err("fmt chunk too short"));
    }
    let mut tag = read_u16(bytes, 0)?;
    let channels = read_u16(bytes, 2)? as usize;
    let sample_rate = read_u32(bytes, 4)?;
    let bits = read_u16(bytes, 14)?;
    if tag == 0xFFFE {
        // Extensible: the real format tag is the leading u16 of the
        // subformat GUID at offset 24.
        if bytes.len() < 26 {
            return Err(parse_err("extensible fmt chunk too short"));
        }
        tag = read_u16(bytes, 24)?;
    }
    let format = match (tag, bits) {
        (1, 16) => WavFormat::Pcm16,
        (1, 24) => WavFormat::Pcm24,
        (1, 32) => WavFormat::Pcm32,
        (3, 32) => WavFormat::Float32,
        (t, b) => {
            return Err(WavError::Unsupported(format!(
                "format tag {t} with {b} bits"
            )))
        }
    };
    if channels == 0 {
        return Err(parse_err("zero channels"));
    }
    if sample_rate == 0 {
        return Err(parse_err("zero sample rate"));
    }
    Ok(FmtChunk {
        format,
        channels,
        sample_rate,
    })
}

/// Decode a RIFF/WAVE byte buffer into a [−1, 1] float signal.
pub fn decode_wav(bytes: &[u8]) -> Result<(Signal, WavFormat), WavError> {
    if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(parse_err("missing RIFF/WAVE header"));
    }
    let mut pos = 12;
    let mut fmt: Option<FmtChunk> = None;
    let mut data: Option<&[u8]> = None;
    while pos + 8 <= bytes.len() {
        let id = &bytes[pos..pos + 4];
        let size = read_u32(bytes, pos + 4)? as usize;
        let body = bytes
            .get(pos + 8..pos + 8 + size)
            .ok_or_else(|| parse_err("chunk overruns file"))?;
        match id {
            b"fmt " => fmt = Some(parse_fmt(body)?),
            b"data" => data = Some(body),
            _ => {}
        }
        // Chunks are word-aligned.
        pos += 8 + size + size % 2;
    }
    let fmt = fmt.ok_or_else(|| parse_err("missing fmt chunk"))?;
    let data = data.ok_or_else(|| parse_err("missing data chunk"))?;
    let bytes_per_sample = (fmt.format.bits() / 8) as usize;
    let frame_bytes = bytes_per_sample * fmt.channels;
    if data.is_empty() || data.len() % frame_bytes != 0 {
        return Err(parse_err("data chunk not a whole number of frames"));
    }
    let n_frames = data.len() / frame_bytes;
    let mut channels = vec![Vec::with_capacity(n_frames); fmt.channels];
    for frame in 0..n_frames {
        for (ch, out) in channels.iter_mut().enumerate() {
            let at = frame * frame_bytes + ch * bytes_per_sample;
            let s = &data[at..at + bytes_per_sample];
            let value = match fmt.format {
                WavFormat::Pcm16 => i16::from_le_bytes([s[0], s[1]]) as f64 / 32768.0,
                WavFormat::Pcm24 => {
                    let raw = i32::from_le_bytes([0, s[0], s[1], s[2]]) >> 8;
                    raw as f64 / 8_388_608.0
                }
                WavFormat::Pcm32 => {
                    i32::from_le_bytes([s[0], s[1], s[2], s[3]]) as f64 / 2_147_483_648.0
                }
                WavFormat::Float32 => f32::from_le_bytes([s[0], s[1], s[2], s[3]]) as f64,
            };
            out.push(value);
        }
    }
    let signal = Signal::new(channels, fmt.sample_rate)
        .map_err(|e| parse_err(&format!("invalid payload: {e}")))?;
    Ok((signal, fmt.format))
}

/// Encode de-interleaved channels as RIFF/WAVE. Samples are clipped to
/// [−1, 1]; returns (bytes, clip count). Zero-length data is rejected.
pub fn encode_wav(
    channels: &[Vec<f64>],
    sample_rate: u32,
    format: WavFormat,
) -> Result<(Vec<u8>, usize), WavError> {
    if channels.is_empty() || channels[0].is_empty() {
        return Err(parse_err("zero-length data"));
    }
    let n_frames = channels[0].len();
    if channels.iter().any(|c| c.len() != n_frames) {
        return Err(parse_err("ragged channels"));
    }
    let bytes_per_sample = (format.bits() / 8) as usize;
    let block_align = (bytes_per_sample * channels.len()) as u16;
    let data_len = n_frames * block_align as usize;

    let mut clipped = 0usize;
    let mut data = Vec::with_capacity(data_len);
    for frame in 0..n_frames {
        for ch in channels {
            let mut x = ch[frame];
            if x > 1.0 {
                x = 1.0;
                clipped += 1;
            } else if x < -1.0 {
                x = -1.0;
                clipped += 1;
            }
            match format {
                WavFormat::Pcm16 => {
                    let v = (x * 32768.0).round().clamp(-32768.0, 32767.0) as i16;
                    data.extend_from_slice(&v.to_le_bytes());
                }
                WavFormat::Pcm24 => {
                    let v = (x * 8_388_608.0).round().clamp(-8_388_608.0, 8_388_607.0) as i32;
                    data.extend_from_slice(&v.to_le_bytes()[..3]);
                }
                WavFormat::Pcm32 => {
                    let v = (x * 2_147_483_648.0)
                        .round()
                        .clamp(-2_147_483_648.0, 2_147_483_647.0)
                        as i32;
                    data.extend_from_slice(&v.to_le_bytes());
                }
                WavFormat::Float32 => {
                    data.extend_from_slice(&(x as f32).to_le_bytes());
                }
            }
        }
    }

    let is_float = format == WavFormat::Float32;
    // Non-PCM formats carry a fact chunk with the frame count.
    let fact_len = if is_float { 12 } else { 0 };
    let riff_len = 4 + 24 + fact_len + 8 + data.len();
    let mut out = Vec::with_capacity(8 + riff_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(riff_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&format.format_tag().to_le_bytes());
    out.extend_from_slice(&(channels.len() as u16).to_le_bytes());
    out.extend_from_slice(&sample_rate.to_le_bytes());
    out.extend_from_slice(&(sample_rate * block_align as u32).to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&format.bits().to_le_bytes());
    if is_float {
        out.extend_from_slice(b"fact");
        out.extend_from_slice(&4u32.to_le_bytes());
        out.extend_from_slice(&(n_frames as u32).to_le_bytes());
    }
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data.len() as u32).to_le_bytes());
    out.extend_from_slice(&data);
    if data.len() % 2 == 1 {
        out.push(0);
    }
    Ok((out, clipped))
}

pub fn read_wav(path: impl AsRef<Path>) -> Result<(Signal, WavFormat), WavError> {
    decode_wav(&fs::read(path)?)
}

/// Write a signal; returns the number of clipped samples.
pub fn write_wav(
    path: impl AsRef<Path>,
    signal: &Signal,
    format: WavFormat,
) -> Result<usize, WavError> {
    let (bytes, clipped) = encode_wav(signal.channels(), signal.sample_rate(), format)?;
    fs::write(path, bytes)?;
    Ok(clipped)
}

/// The raw data-chunk payload of an encoded WAV (for byte-exactness
/// checks).
pub fn data_chunk(bytes: &[u8]) -> Option<&[u8]> {
    let mut pos = 12;
    while pos + 8 <= bytes.len() {
        let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().ok()?) as usize;
        if &bytes[pos..pos + 4] == b"data" {
            return bytes.get(pos + 8..pos + 8 + size);
        }
        pos += 8 + size + size % 2;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_round_trip_pcm16() {
        let signal = Signal::zeros(1, 16000, 16000).unwrap();
        let (bytes, clipped) = encode_wav(signal.channels(), 16000, WavFormat::Pcm16).unwrap();
        assert_eq!(clipped, 0);
        let (back, fmt) = decode_wav(&bytes).unwrap();
        assert_eq!(fmt, WavFormat::Pcm16);
        assert_eq!(back.sample_rate(), 16000);
        assert_eq!(back.len(), 16000);
        assert!(back.channel(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn pcm16_min_value_is_minus_one() {
        let mut bytes = encode_wav(&[vec![0.0, 0.0]], 8000, WavFormat::Pcm16)
            .unwrap()
            .0;
        let at = bytes.len() - 4;
        bytes[at..at + 2].copy_from_slice(&(-32768i16).to_le_bytes());
        let (signal, _) = decode_wav(&bytes).unwrap();
        assert_eq!(signal.channel(0)[0], -1.0);
    }

    #[test]
    fn out_of_range_sample_clips_and_counts() {
        let (bytes, clipped) = encode_wav(&[vec![1.5, 0.0]], 8000, WavFormat::Float32).unwrap();
        assert_eq!(clipped, 1);
        let (signal, _) = decode_wav(&bytes).unwrap();
        assert_eq!(signal.channel(0)[0], 1.0);
    }

    #[test]
    fn empty_signal_rejected() {
        assert!(matches!(
            encode_wav(&[], 8000, WavFormat::Pcm16),
            Err(WavError::Parse(_))
        ));
        assert!(matches!(
            encode_wav(&[vec![]], 8000, WavFormat::Pcm16),
            Err(WavError::Parse(_))
        ));
    }

    fn ramp(n: usize) -> Vec<f64> {
        (0..n).map(|i| (i as f64 / n as f64) * 1.9 - 0.95).collect()
    }

    #[test]
    fn float32_round_trip_bit_exact() {
        let chans = vec![ramp(777), ramp(777).iter().map(|v| -v).collect()];
        let chans: Vec<Vec<f64>> = chans
            .iter()
            .map(|c| c.iter().map(|&v| v as f32 as f64).collect())
            .collect();
        let (bytes, _) = encode_wav(&chans, 44100, WavFormat::Float32).unwrap();
        let (back, fmt) = decode_wav(&bytes).unwrap();
        assert_eq!(fmt, WavFormat::Float32);
        assert_eq!(back.channels(), &chans[..]);
    }

    #[test]
    fn pcm_read_write_data_chunk_byte_identical() {
        for fmt in [WavFormat::Pcm16, WavFormat::Pcm24, WavFormat::Pcm32] {
            let (bytes, _) = encode_wav(&[ramp(513)], 22050, fmt).unwrap();
            let (signal, read_fmt) = decode_wav(&bytes).unwrap();
            assert_eq!(read_fmt, fmt);
            let (bytes2, clipped) =
                encode_wav(signal.channels(), signal.sample_rate(), fmt).unwrap();
            assert_eq!(clipped, 0);
            assert_eq!(data_chunk(&bytes), data_chunk(&bytes2), "{fmt:?}");
        }
    }

    #[test]
    fn extensible_header_accepted() {
        // Hand-build an extensible-format file wrapping PCM16.
        let payload: [i16; 4] = [0, 1000, -1000, 32767];
        let mut data = Vec::new();
        for v in payload {
            data.extend_from_slice(&v.to_le_bytes());
        }
        let mut fmt = Vec::new();
        fmt.extend_from_slice(&0xFFFEu16.to_le_bytes());
        fmt.extend_from_slice(&1u16.to_le_bytes());
        fmt.extend_from_slice(&8000u32.to_le_bytes());
        fmt.extend_from_slice(&16000u32.to_le_bytes());
        fmt.extend_from_slice(&2u16.to_le_bytes());
        fmt.extend_from_slice(&16u16.to_le_bytes());
        fmt.extend_from_slice(&22u16.to_le_bytes());
        fmt.extend_from_slice(&16u16.to_le_bytes());
        fmt.extend_from_slice(&0u32.to_le_bytes());
        fmt.extend_from_slice(&1u16.to_le_bytes());
        fmt.extend_from_slice(&[0u8; 14]);
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"RIFF");
        bytes.extend_from_slice(&((4 + 8 + fmt.len() + 8 + data.len()) as u32).to_le_bytes());
        bytes.extend_from_slice(b"WAVE");
        bytes.extend_from_slice(b"fmt ");
        bytes.extend_from_slice(&(fmt.len() as u32).to_le_bytes());
        bytes.extend_from_slice(&fmt);
        bytes.extend_from_slice(b"data");
        bytes.extend_from_slice(&(data.len() as u32).to_le_bytes());
        bytes.extend_from_slice(&data);
        let (signal, read_fmt) = decode_wav(&bytes).unwrap();
        assert_eq!(read_fmt, WavFormat::Pcm16);
        assert_eq!(signal.len(), 4);
        assert_eq!(signal.channel(0)[3], 32767.0 / 32768.0);
    }

    #[test]
    fn malformed_and_unsupported() {
        assert!(matches!(decode_wav(b"nope"), Err(WavError::Parse(_))));
        let (mut bytes, _) = encode_wav(&[vec![0.1; 8]], 8000, WavFormat::Pcm16).unwrap();
        // Corrupt bits-per-sample to an unsupported value.
        bytes[34] = 12;
        assert!(matches!(decode_wav(&bytes), Err(WavError::Unsupported(_))));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.wav");
        let signal = Signal::mono(ramp(2000), 16000).unwrap();
        write_wav(&path, &signal, WavFormat::Pcm24).unwrap();
        let (back, fmt) = read_wav(&path).unwrap();
        assert_eq!(fmt, WavFormat::Pcm24);
        assert_eq!(back.len(), signal.len());
        for (a, b) in back.channel(0).iter().zip(signal.channel(0)) {
            assert!((a - b).abs() < 1.0 / 8_388_608.0);
        }
    }
}

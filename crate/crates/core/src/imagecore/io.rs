//! PGM / PNG input and PGM / raw float output.
//!
//! `raw_f32` layout: width and height as little-endian `u32`, followed by
//! `width * height` little-endian `f32` samples in row-major order.

use std::fs;
use std::io::{BufReader, Cursor};
use std::path::Path;

use super::ImageF;
use crate::error::{Error, Result};

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', 0x0d, 0x0a, 0x1a, 0x0a];

/// Rec.601 luma weights.
const LUMA: [f64; 3] = [0.299, 0.587, 0.114];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaveMode {
    /// Binary PGM, maxval 255.
    Pgm8,
    /// Binary PGM, maxval 65535, big-endian samples.
    Pgm16,
    /// Headered little-endian `f32` dump.
    RawF32,
}

impl std::str::FromStr for SaveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pgm8" => Ok(SaveMode::Pgm8),
            "pgm16" => Ok(SaveMode::Pgm16),
            "raw_f32" | "raw-f32" | "f32" => Ok(SaveMode::RawF32),
            other => Err(Error::Config(format!("unknown save mode `{other}`"))),
        }
    }
}

/// Loads a PGM (P2/P5), PNG or raw_f32 file as luminance in `[0, 1]`.
///
/// The format is sniffed from the file contents, not the extension.
pub fn load_image(path: impl AsRef<Path>) -> Result<ImageF> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

/// Decodes an in-memory image; see [`load_image`].
pub fn decode_image(bytes: &[u8]) -> Result<ImageF> {
    if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P2") {
        decode_pgm(bytes)
    } else if let Some(img) = decode_raw_f32(bytes)? {
        Ok(img)
    } else {
        Err(Error::Format("unrecognised image format".into()))
    }
}

pub fn save_image(img: &ImageF, path: impl AsRef<Path>, mode: SaveMode) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_image(img, mode)).map_err(|e| Error::io(path, e))
}

pub fn encode_image(img: &ImageF, mode: SaveMode) -> Vec<u8> {
    let (w, h) = img.dims();
    match mode {
        SaveMode::Pgm8 => {
            let mut out = format!("P5\n{w} {h}\n255\n").into_bytes();
            out.extend(img.data().iter().map(|&v| quantize(v, 255) as u8));
            out
        }
        SaveMode::Pgm16 => {
            let mut out = format!("P5\n{w} {h}\n65535\n").into_bytes();
            for &v in img.data() {
                out.extend_from_slice(&(quantize(v, 65535) as u16).to_be_bytes());
            }
            out
        }
        SaveMode::RawF32 => {
            let mut out = Vec::with_capacity(8 + 4 * w * h);
            out.extend_from_slice(&(w as u32).to_le_bytes());
            out.extend_from_slice(&(h as u32).to_le_bytes());
            for &v in img.data() {
                out.extend_from_slice(&(v as f32).to_le_bytes());
            }
            out
        }
    }
}

/// Round-half-up quantisation of a clamped `[0, 1]` value.
fn quantize(v: f64, maxval: u32) -> u32 {
    (v.clamp(0.0, 1.0) * maxval as f64 + 0.5).floor() as u32
}

struct PgmHeader {
    ascii: bool,
    width: usize,
    height: usize,
    maxval: u32,
    data_start: usize,
}

fn parse_pgm_header(bytes: &[u8]) -> Result<PgmHeader> {
    let ascii = &bytes[..2] == b"P2";
    let mut pos = 2;
    let mut fields = [0u64; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::Format("truncated PGM header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("malformed PGM header".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format("PGM header value out of range".into()))?;
    }
    // exactly one whitespace byte separates the header from binary data
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Format("truncated PGM header".into()));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::Format("PGM dimensions must be positive".into()));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Format(format!("unsupported PGM maxval {maxval}")));
    }
    Ok(PgmHeader {
        ascii,
        width: width as usize,
        height: height as usize,
        maxval: maxval as u32,
        data_start: pos,
    })
}

fn decode_pgm(bytes: &[u8]) -> Result<ImageF> {
    let hdr = parse_pgm_header(bytes)?;
    let n = hdr
        .width
        .checked_mul(hdr.height)
        .ok_or_else(|| Error::Format("PGM dimensions overflow".into()))?;
    let scale = 1.0 / hdr.maxval as f64;
    let body = &bytes[hdr.data_start..];
    let samples: Vec<u32> = if hdr.ascii {
        let text = std::str::from_utf8(body).map_err(|_| Error::Format("non-ASCII P2 body".into()))?;
        let vals: Vec<u32> = text
            .split_ascii_whitespace()
            .take(n)
            .map(|t| t.parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Format("bad P2 sample".into()))?;
        vals
    } else if hdr.maxval < 256 {
        body.get(..n)
            .ok_or_else(|| Error::Format("truncated PGM data".into()))?
            .iter()
            .map(|&b| b as u32)
            .collect()
    } else {
        body.get(..2 * n)
            .ok_or_else(|| Error::Format("truncated PGM data".into()))?
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as u32)
            .collect()
    };
    if samples.len() != n {
        return Err(Error::Format("truncated PGM data".into()));
    }
    if samples.iter().any(|&s| s > hdr.maxval) {
        return Err(Error::Format("PGM sample exceeds maxval".into()));
    }
    let data = samples.into_iter().map(|s| s as f64 * scale).collect();
    ImageF::new(hdr.width, hdr.height, data)
}

fn decode_png(bytes: &[u8]) -> Result<ImageF> {
    let fmt = |e: png::DecodingError| Error::Format(format!("PNG: {e}"));
    let mut decoder = png::Decoder::new(BufReader::new(Cursor::new(bytes)));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(fmt)?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::Format("PNG too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(fmt)?;
    let (w, h) = (info.width as usize, info.height as usize);
    let channels = info.color_type.samples();
    let wide = info.bit_depth == png::BitDepth::Sixteen;
    let maxval = if wide { 65535.0 } else { 255.0 };
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        let line = &buf[y * info.line_size..(y + 1) * info.line_size];
        for x in 0..w {
            let sample = |c: usize| -> f64 {
                let i = x * channels + c;
                if wide {
                    u16::from_be_bytes([line[2 * i], line[2 * i + 1]]) as f64
                } else {
                    line[i] as f64
                }
            };
            let v = match channels {
                1 | 2 => sample(0),
                3 | 4 => LUMA[0] * sample(0) + LUMA[1] * sample(1) + LUMA[2] * sample(2),
                n => return Err(Error::Format(format!("unsupported PNG channel count {n}"))),
            };
            data.push(v / maxval);
        }
    }
    ImageF::new(w, h, data)
}

fn decode_raw_f32(bytes: &[u8]) -> Result<Option<ImageF>> {
    if bytes.len() < 8 {
        return Ok(None);
    }
    let w = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let h = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if w == 0 || h == 0 || w.checked_mul(h).and_then(|n| n.checked_mul(4)) != Some(bytes.len() - 8) {
        return Ok(None);
    }
    let data = bytes[8..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    ImageF::new(w, h, data).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn png_bytes(w: u32, h: u32, color: png::ColorType, depth: png::BitDepth, data: &[u8]) -> Vec<u8> {
        let mut out = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut out, w, h);
            enc.set_color(color);
            enc.set_depth(depth);
            let mut writer = enc.write_header().unwrap();
            writer.write_image_data(data).unwrap();
        }
        out
    }

    #[test]
    fn binary_pgm_scales_to_unit_range() {
        let mut bytes = b"P5\n2 2\n255\n".to_vec();
        bytes.extend([0, 255, 255, 0]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.dims(), (2, 2));
        assert_eq!(img.data(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn ascii_pgm_with_comments() {
        let text = b"P2\n# a comment\n3 1\n# another\n65535\n0 65535\n32768\n";
        let img = decode_image(text).unwrap();
        assert_eq!(img.data()[1], 1.0);
        assert!((img.data()[2] - 32768.0 / 65535.0).abs() < 1e-15);
    }

    #[test]
    fn sixteen_bit_binary_pgm() {
        let mut bytes = b"P5 1 2 65535\n".to_vec();
        bytes.extend([0xff, 0xff, 0x00, 0x01]);
        let img = decode_image(&bytes).unwrap();
        assert_eq!(img.data()[0], 1.0);
        assert!((img.data()[1] - 1.0 / 65535.0).abs() < 1e-18);
    }

    #[test]
    fn truncated_pgm_is_format_error() {
        assert!(matches!(decode_image(b"P5\n2 2"), Err(Error::Format(_))));
        assert!(matches!(decode_image(b"P5\n2 2\n255\n\x00\x01"), Err(Error::Format(_))));
        assert!(matches!(decode_image(b"P2\n2 1\n255\n0"), Err(Error::Format(_))));
        assert!(matches!(decode_image(b"P5\n2 1\n300\n\x00\x00\x00"), Err(Error::Format(_))));
    }

    #[test]
    fn unknown_bytes_are_format_error() {
        assert!(matches!(decode_image(b"GIF89a"), Err(Error::Format(_))));
    }

    #[test]
    fn png_gray_pixel() {
        let bytes = png_bytes(1, 1, png::ColorType::Grayscale, png::BitDepth::Eight, &[128]);
        let img = decode_image(&bytes).unwrap();
        assert!((img.data()[0] - 128.0 / 255.0).abs() < 1e-15);
        assert!((img.data()[0] - 0.50196).abs() < 1e-5);
    }

    #[test]
    fn png_rgb_uses_rec601() {
        let bytes = png_bytes(
            2,
            1,
            png::ColorType::Rgba,
            png::BitDepth::Eight,
            &[255, 0, 0, 7, 0, 0, 255, 255],
        );
        let img = decode_image(&bytes).unwrap();
        assert!((img.data()[0] - 0.299).abs() < 1e-12);
        assert!((img.data()[1] - 0.114).abs() < 1e-12);
    }

    #[test]
    fn png_sixteen_bit_gray() {
        let bytes = png_bytes(1, 1, png::ColorType::Grayscale, png::BitDepth::Sixteen, &[0xff, 0xff]);
        assert_eq!(decode_image(&bytes).unwrap().data(), &[1.0]);
    }

    #[test]
    fn corrupt_png_is_format_error() {
        let mut bytes = png_bytes(4, 4, png::ColorType::Grayscale, png::BitDepth::Eight, &[9; 16]);
        bytes.truncate(bytes.len() - 20);
        assert!(matches!(decode_image(&bytes), Err(Error::Format(_))));
    }

    #[test]
    fn pgm8_quantization() {
        let img = ImageF::new(3, 1, vec![1.0, 0.5, 0.0]).unwrap();
        let bytes = encode_image(&img, SaveMode::Pgm8);
        assert_eq!(&bytes[bytes.len() - 3..], &[255, 128, 0]);
    }

    #[test]
    fn pgm_round_trip_within_quantization() {
        let img = ImageF::from_fn(5, 4, |x, y| ((x * 7 + y * 3) % 11) as f64 / 10.0);
        for (mode, step) in [(SaveMode::Pgm8, 1.0 / 255.0), (SaveMode::Pgm16, 1.0 / 65535.0)] {
            let back = decode_image(&encode_image(&img, mode)).unwrap();
            for (a, b) in img.data().iter().zip(back.data()) {
                assert!((a - b).abs() <= 0.5 * step + 1e-12, "{mode:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = load_image("/definitely/not/here.pgm").unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}

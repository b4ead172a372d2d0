//! Binary PGM (P5) codec.
//!
//! Images are read from 8-bit P5 files (maxval at most 255) and written back
//! with a canonical header: `P5\n<w> <h>\n<maxval>\n`, no comments. Label maps
//! are written as 16-bit P5 (maxval 65535), most significant byte first.

use crate::error::{Error, Result};
use crate::image::{GrayImage, LabelMap};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn read_number(&mut self, what: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::MalformedHeader(format!("expected numeric {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::MalformedHeader(format!("{what} out of range")))
    }
}

/// Decodes a binary 8-bit PGM.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::MalformedHeader("missing P5 magic".into()));
    }
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.read_number("width")? as usize;
    let height = cur.read_number("height")? as usize;
    let maxval = cur.read_number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval == 0 {
        return Err(Error::MalformedHeader("maxval must be positive".into()));
    }
    if maxval > 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(Error::MalformedHeader("no separator after maxval".into())),
    }
    let expected = width * height;
    let payload = &bytes[cur.pos..];
    if payload.len() < expected {
        return Err(Error::TruncatedPayload {
            expected,
            actual: payload.len(),
        });
    }
    let pixels = payload[..expected].iter().map(|&b| f64::from(b)).collect();
    GrayImage::new(width, height, pixels)
}

fn header(width: usize, height: usize, maxval: u32) -> Vec<u8> {
    format!("P5\n{width} {height}\n{maxval}\n").into_bytes()
}

/// Quantizes a real intensity to a byte: round half away from zero, clamp.
#[inline]
pub fn quantize(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Encodes an image as binary 8-bit PGM.
pub fn write_pgm(image: &GrayImage) -> Vec<u8> {
    write_pgm_values(image.width(), image.height(), image.pixels())
}

/// Encodes any grid of intensities as binary 8-bit PGM.
pub fn write_pgm_values(width: usize, height: usize, values: &[f64]) -> Vec<u8> {
    let mut out = header(width, height, 255);
    out.reserve(values.len());
    out.extend(values.iter().map(|&v| quantize(v)));
    out
}

/// Encodes a finalized label map as binary 16-bit PGM, big-endian samples.
pub fn write_label_pgm(map: &LabelMap) -> Result<Vec<u8>> {
    if let Some(&max) = map.as_slice().iter().max() {
        if max > u32::from(u16::MAX) {
            return Err(Error::LabelOverflow(max));
        }
    }
    let mut out = header(map.width(), map.height(), 65535);
    out.reserve(2 * map.len());
    for &label in map.as_slice() {
        out.extend_from_slice(&(label as u16).to_be_bytes());
    }
    Ok(out)
}

//! Portable Float Map.
//!
//! Header: `PF` (RGB) or `Pf` (gray), then `width height`, then a scale whose
//! sign gives the byte order (negative = little-endian). Scanlines are stored
//! bottom to top as raw 32-bit floats.

use std::io::Write;
use std::path::Path;

use super::HeaderCursor;
use crate::error::{Error, FormatErrorKind, Result};
use crate::image::Image;

/// Parses a PFM byte buffer. Values are returned verbatim (including
/// negatives); callers decide how to sanitize them.
pub fn decode_pfm(bytes: &[u8], path: &Path) -> Result<Image<f64>> {
    let malformed = |d: &str| Error::format(path, FormatErrorKind::MalformedHeader, d);
    let mut cur = HeaderCursor::new(bytes);
    let channels = match cur.token() {
        Some(b"PF") => 3,
        Some(b"Pf") => 1,
        _ => return Err(malformed("missing PF/Pf magic")),
    };
    let mut number = |what: &str| -> Result<String> {
        cur.token()
            .and_then(|t| std::str::from_utf8(t).ok())
            .map(str::to_owned)
            .ok_or_else(|| malformed(&format!("missing {what}")))
    };
    let width: usize = number("width")?
        .parse()
        .map_err(|_| malformed("bad width"))?;
    let height: usize = number("height")?
        .parse()
        .map_err(|_| malformed("bad height"))?;
    let scale: f64 = number("scale")?
        .parse()
        .map_err(|_| malformed("bad scale"))?;
    if width == 0 || height == 0 {
        return Err(malformed("zero dimension"));
    }
    if scale == 0.0 || !scale.is_finite() {
        return Err(malformed("scale must be finite and non-zero"));
    }
    let little = scale < 0.0;
    // exactly one whitespace byte separates the header from the payload
    let start = cur.position() + 1;
    let count = width * height * channels;
    let payload = bytes.get(start..).unwrap_or(&[]);
    if payload.len() < count * 4 {
        return Err(Error::format(
            path,
            FormatErrorKind::TruncatedPayload,
            format!(
                "expected {} payload bytes, found {}",
                count * 4,
                payload.len()
            ),
        ));
    }

    let mut data = vec![0.0; count];
    let row = width * channels;
    for (file_row, chunk) in payload[..count * 4].chunks_exact(row * 4).enumerate() {
        let y = height - 1 - file_row;
        for (i, b) in chunk.chunks_exact(4).enumerate() {
            let raw = [b[0], b[1], b[2], b[3]];
            let v = if little {
                f32::from_le_bytes(raw)
            } else {
                f32::from_be_bytes(raw)
            };
            data[y * row + i] = v as f64;
        }
    }
    Image::new(width, height, channels, data)
}

/// Serializes as little-endian PFM (scale `-1.0`).
pub fn encode_pfm(img: &Image<f64>) -> Vec<u8> {
    let (w, h, c) = img.dims();
    let magic = if c == 3 { "PF" } else { "Pf" };
    let mut out = format!("{magic}\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * c * 4);
    let row = w * c;
    for y in (0..h).rev() {
        for v in &img.data()[y * row..(y + 1) * row] {
            out.extend_from_slice(&(*v as f32).to_le_bytes());
        }
    }
    out
}

pub fn write_pfm(img: &Image<f64>, path: &Path) -> Result<()> {
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode_pfm(img))
        .map_err(|e| Error::io(path, e))
}

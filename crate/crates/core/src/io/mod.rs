//! HDR and LDR file I/O.
//!
//! PFM is the canonical HDR interchange (read and write). Radiance RGBE is
//! read-only. Sensor images, winding maps and edge masks are written as PNG.

mod pfm;
mod png;
mod rgbe;

use std::path::Path;

pub use self::png::{
    read_png_u16, read_sensor_png, read_winding_png, sensor_code, write_edges_png,
    write_sensor_png, write_winding_png,
};
pub use pfm::{decode_pfm, encode_pfm, write_pfm};
pub use rgbe::{decode_rgbe, rgbe_to_rgb};

use crate::error::{Error, FormatErrorKind, Result};
use crate::image::{Image, IrradianceImage};

/// Result of reading an HDR file.
#[derive(Debug, Clone)]
pub struct HdrRead {
    pub image: IrradianceImage,
    /// Negative samples that were clamped to 0.
    pub clamped: usize,
}

/// Reads a PFM or Radiance RGBE file, detected by its signature.
pub fn read_hdr(path: impl AsRef<Path>) -> Result<IrradianceImage> {
    Ok(read_hdr_with_stats(path)?.image)
}

pub fn read_hdr_with_stats(path: impl AsRef<Path>) -> Result<HdrRead> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let raw = decode_hdr_bytes(&bytes, path)?;
    sanitize(raw, path)
}

pub fn decode_hdr_bytes(bytes: &[u8], path: &Path) -> Result<Image<f64>> {
    if bytes.starts_with(b"PF") || bytes.starts_with(b"Pf") {
        decode_pfm(bytes, path)
    } else if bytes.starts_with(b"#?") {
        decode_rgbe(bytes, path)
    } else {
        Err(Error::format(
            path,
            FormatErrorKind::Unsupported,
            "neither a PFM nor a Radiance RGBE file",
        ))
    }
}

fn sanitize(raw: Image<f64>, path: &Path) -> Result<HdrRead> {
    if raw.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::format(
            path,
            FormatErrorKind::MalformedHeader,
            "payload contains non-finite samples",
        ));
    }
    let clamped = raw.data().iter().filter(|&&v| v < 0.0).count();
    if clamped > 0 {
        log::warn!(
            "{}: clamped {clamped} negative samples to 0",
            path.display()
        );
    }
    let image = IrradianceImage::from_image(raw.map(|v| v.max(0.0)))?;
    Ok(HdrRead { image, clamped })
}

/// Writes an HDR image as little-endian PFM (samples narrowed to `f32`).
pub fn write_hdr(img: &IrradianceImage, path: impl AsRef<Path>) -> Result<()> {
    write_pfm(img.as_image(), path.as_ref())
}

/// Whitespace-delimited token scanner for text headers.
pub(crate) struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn token(&mut self) -> Option<&'a [u8]> {
        while self.bytes.get(self.pos)?.is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.bytes[start..self.pos])
    }
}

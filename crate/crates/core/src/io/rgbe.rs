//! Radiance RGBE (`.hdr`) reader: flat, old-style RLE and adaptive
//! per-channel RLE scanlines.

use std::path::Path;

use crate::error::{Error, FormatErrorKind, Result};
use crate::image::Image;

/// Converts one RGBE quadruple to linear RGB: `mantissa · 2^(e − 136)`.
pub fn rgbe_to_rgb(p: [u8; 4]) -> [f64; 3] {
    if p[3] == 0 {
        return [0.0; 3];
    }
    let f = 2f64.powi(p[3] as i32 - 136);
    [p[0] as f64 * f, p[1] as f64 * f, p[2] as f64 * f]
}

pub fn decode_rgbe(bytes: &[u8], path: &Path) -> Result<Image<f64>> {
    let malformed = |d: &str| Error::format(path, FormatErrorKind::MalformedHeader, d);
    let unsupported = |d: &str| Error::format(path, FormatErrorKind::Unsupported, d);

    let mut pos = 0;
    let mut line = || -> Option<&[u8]> {
        let rest = bytes.get(pos..)?;
        let end = rest.iter().position(|&b| b == b'\n')?;
        pos += end + 1;
        Some(&rest[..end])
    };

    let magic = line().ok_or_else(|| malformed("missing signature line"))?;
    if !magic.starts_with(b"#?") {
        return Err(malformed("signature must start with '#?'"));
    }
    loop {
        let l = line().ok_or_else(|| malformed("header not terminated by a blank line"))?;
        if l.is_empty() {
            break;
        }
        if let Some(fmt) = l.strip_prefix(b"FORMAT=") {
            if fmt != b"32-bit_rle_rgbe" {
                return Err(unsupported(&format!(
                    "pixel format {}",
                    String::from_utf8_lossy(fmt)
                )));
            }
        }
    }
    let res = line().ok_or_else(|| malformed("missing resolution line"))?;
    let res = std::str::from_utf8(res).map_err(|_| malformed("resolution line is not text"))?;
    let fields: Vec<&str> = res.split_whitespace().collect();
    let (height, width) = match fields.as_slice() {
        ["-Y", h, "+X", w] => (
            h.parse::<usize>().map_err(|_| malformed("bad height"))?,
            w.parse::<usize>().map_err(|_| malformed("bad width"))?,
        ),
        [a, _, b, _] if a.len() == 2 && b.len() == 2 => {
            return Err(unsupported(&format!("orientation '{res}'")))
        }
        _ => return Err(malformed(&format!("resolution line '{res}'"))),
    };
    if width == 0 || height == 0 {
        return Err(malformed("zero dimension"));
    }

    let mut reader = Scan { bytes, pos, path };
    let mut data = Vec::with_capacity(width * height * 3);
    let mut scan = vec![[0u8; 4]; width];
    for _ in 0..height {
        reader.scanline(&mut scan)?;
        for px in &scan {
            data.extend_from_slice(&rgbe_to_rgb(*px));
        }
    }
    Image::new(width, height, 3, data)
}

struct Scan<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl Scan<'_> {
    fn truncated(&self) -> Error {
        Error::format(
            self.path,
            FormatErrorKind::TruncatedPayload,
            format!("payload ends at byte {}", self.bytes.len()),
        )
    }

    fn byte(&mut self) -> Result<u8> {
        let b = *self.bytes.get(self.pos).ok_or_else(|| self.truncated())?;
        self.pos += 1;
        Ok(b)
    }

    fn quad(&mut self) -> Result<[u8; 4]> {
        Ok([self.byte()?, self.byte()?, self.byte()?, self.byte()?])
    }

    fn scanline(&mut self, out: &mut [[u8; 4]]) -> Result<()> {
        let width = out.len();
        if !(8..=0x7fff).contains(&width) {
            return self.flat(out);
        }
        let first = self.quad()?;
        if first[0] != 2 || first[1] != 2 || first[2] & 0x80 != 0 {
            return self.flat_from(out, first);
        }
        let declared = ((first[2] as usize) << 8) | first[3] as usize;
        if declared != width {
            return Err(Error::format(
                self.path,
                FormatErrorKind::MalformedHeader,
                format!("scanline width {declared} != image width {width}"),
            ));
        }
        for ch in 0..4 {
            let mut x = 0;
            while x < width {
                let count = self.byte()? as usize;
                if count > 128 {
                    let run = count - 128;
                    let v = self.byte()?;
                    if x + run > width {
                        return Err(self.overrun());
                    }
                    for px in &mut out[x..x + run] {
                        px[ch] = v;
                    }
                    x += run;
                } else {
                    if count == 0 || x + count > width {
                        return Err(self.overrun());
                    }
                    for px in &mut out[x..x + count] {
                        px[ch] = self.byte()?;
                    }
                    x += count;
                }
            }
        }
        Ok(())
    }

    fn overrun(&self) -> Error {
        Error::format(
            self.path,
            FormatErrorKind::MalformedHeader,
            "run-length record overruns scanline",
        )
    }

    fn flat(&mut self, out: &mut [[u8; 4]]) -> Result<()> {
        let first = self.quad()?;
        self.flat_from(out, first)
    }

    /// Uncompressed pixels, with old-style `(1,1,1,n)` repeat records.
    fn flat_from(&mut self, out: &mut [[u8; 4]], first: [u8; 4]) -> Result<()> {
        let mut x = 0;
        let mut shift = 0;
        let mut next = Some(first);
        while x < out.len() {
            let px = match next.take() {
                Some(p) => p,
                None => self.quad()?,
            };
            if px[0] == 1 && px[1] == 1 && px[2] == 1 {
                if x == 0 {
                    return Err(self.overrun());
                }
                let run = (px[3] as usize) << shift;
                if x + run > out.len() {
                    return Err(self.overrun());
                }
                let prev = out[x - 1];
                out[x..x + run].fill(prev);
                x += run;
                shift += 8;
            } else {
                out[x] = px;
                x += 1;
                shift = 0;
            }
        }
        Ok(())
    }
}

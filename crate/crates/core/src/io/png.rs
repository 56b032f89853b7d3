//! 16-bit PNG export of sensor images, winding maps and edge masks.

use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::codec::{CodecParams, SensorImage};
use crate::error::{Error, FormatErrorKind, Result};
use crate::image::{Image, WindingMap};
use crate::unwrap::WrapEdgeMask;

fn color_type(channels: usize) -> png::ColorType {
    if channels == 3 {
        png::ColorType::Rgb
    } else {
        png::ColorType::Grayscale
    }
}

fn png_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::format(path, FormatErrorKind::MalformedHeader, e.to_string())
}

fn write_png(
    path: &Path,
    (w, h, c): (usize, usize, usize),
    depth: png::BitDepth,
    bytes: &[u8],
) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut enc = png::Encoder::new(BufWriter::new(file), w as u32, h as u32);
    enc.set_color(color_type(c));
    enc.set_depth(depth);
    let mut writer = enc.write_header().map_err(|e| png_error(path, e))?;
    writer
        .write_image_data(bytes)
        .map_err(|e| png_error(path, e))?;
    writer.finish().map_err(|e| png_error(path, e))
}

fn write_u16(
    path: &Path,
    dims: (usize, usize, usize),
    samples: impl Iterator<Item = u16>,
) -> Result<()> {
    let bytes: Vec<u8> = samples.flat_map(u16::to_be_bytes).collect();
    write_png(path, dims, png::BitDepth::Sixteen, &bytes)
}

/// Reads a grayscale or RGB PNG into 16-bit samples (8-bit files are widened
/// to the same code value, not rescaled).
pub fn read_png_u16(path: &Path) -> Result<Image<u16>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = png::Decoder::new(BufReader::new(file))
        .read_info()
        .map_err(|e| png_error(path, e))?;
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| png_error(path, "image too large"))?;
    let mut buf = vec![0; size];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| png_error(path, e))?;
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => {
            return Err(Error::format(
                path,
                FormatErrorKind::Unsupported,
                format!("color type {other:?}"),
            ))
        }
    };
    let (w, h) = (info.width as usize, info.height as usize);
    let row = w * channels;
    let mut data = Vec::with_capacity(row * h);
    for y in 0..h {
        let line = &buf[y * info.line_size..];
        match info.bit_depth {
            png::BitDepth::Sixteen => data.extend(
                line[..row * 2]
                    .chunks_exact(2)
                    .map(|b| u16::from_be_bytes([b[0], b[1]])),
            ),
            png::BitDepth::Eight => data.extend(line[..row].iter().map(|&b| b as u16)),
            other => {
                return Err(Error::format(
                    path,
                    FormatErrorKind::Unsupported,
                    format!("bit depth {other:?}"),
                ))
            }
        }
    }
    Image::new(w, h, channels, data)
}

/// Sensor code for one sample: `round(value · 65535 / I_max)`.
pub fn sensor_code(value: f64, i_max: f64) -> u16 {
    (value * 65535.0 / i_max).round().clamp(0.0, 65535.0) as u16
}

pub fn write_sensor_png(sensor: &SensorImage, path: &Path) -> Result<()> {
    let i_max = sensor.params().i_max;
    write_u16(
        path,
        sensor.dims(),
        sensor.data().iter().map(|&v| sensor_code(v, i_max)),
    )
}

/// Reads a sensor PNG back; the top code maps to the largest value below `I_max`.
pub fn read_sensor_png(path: &Path, params: &CodecParams) -> Result<SensorImage> {
    params.validate()?;
    let raw = read_png_u16(path)?;
    let top = params.below_i_max();
    let img = raw.map(|code| (code as f64 * params.i_max / 65535.0).min(top));
    SensorImage::new(img, *params)
}

pub fn write_winding_png(winding: &WindingMap, path: &Path) -> Result<()> {
    if let Some(&v) = winding.data().iter().find(|&&v| v > u16::MAX as u32) {
        return Err(Error::WindingOverflow {
            value: v as u64,
            limit: u16::MAX as u64,
        });
    }
    write_u16(
        path,
        winding.dims(),
        winding.data().iter().map(|&v| v as u16),
    )
}

pub fn read_winding_png(path: &Path) -> Result<WindingMap> {
    Ok(read_png_u16(path)?.map(u32::from))
}

/// Packs a wrap-edge mask into an 8-bit PNG: per sample, bit 0 marks the
/// boundary to `x + 1` and bit 1 its negative sign; bits 2 and 3 do the same
/// for the boundary to `y + 1`.
pub fn write_edges_png(edges: &WrapEdgeMask, path: &Path) -> Result<()> {
    let (w, h, c) = edges.dims();
    let mut bytes = Vec::with_capacity(w * h * c);
    let bits = |s: i8| match s {
        0 => 0u8,
        s if s > 0 => 1,
        _ => 3,
    };
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                let hb = if x + 1 < w {
                    bits(edges.horizontal(x, y, ch))
                } else {
                    0
                };
                let vb = if y + 1 < h {
                    bits(edges.vertical(x, y, ch))
                } else {
                    0
                };
                bytes.push(hb | (vb << 2));
            }
        }
    }
    write_png(path, (w, h, c), png::BitDepth::Eight, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sensor_codes() {
        let p = CodecParams::modulo(1.0);
        assert_eq!(sensor_code(p.below_i_max(), 1.0), 65535);
        assert_eq!(sensor_code(0.0, 1.0), 0);
        assert_eq!(sensor_code(0.5, 1.0), 32768);
    }

    #[test]
    fn winding_roundtrip_and_overflow() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("w.png");
        let w = Image::new(3, 2, 1, vec![0, 3, 65535, 7, 1, 2]).unwrap();
        write_winding_png(&w, &path).unwrap();
        let back = read_winding_png(&path).unwrap();
        assert_eq!(back, w);
        assert_eq!(back.get(1, 0, 0), 3);
        let too_big = Image::new(1, 1, 1, vec![70_000]).unwrap();
        assert!(matches!(
            write_winding_png(&too_big, &path),
            Err(Error::WindingOverflow { .. })
        ));
    }

    #[test]
    fn sensor_png_rgb() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.png");
        let p = CodecParams::mantissa(2.0, 1.0);
        let img = Image::new(
            2,
            1,
            3,
            vec![0.0, 0.25, 0.5, 0.75, 0.999_999_9, p.below_i_max()],
        )
        .unwrap();
        let sensor = SensorImage::new(img, p).unwrap();
        write_sensor_png(&sensor, &path).unwrap();
        let codes = read_png_u16(&path).unwrap();
        assert_eq!(codes.data(), &[0, 16384, 32768, 49151, 65535, 65535]);
        let back = read_sensor_png(&path, &p).unwrap();
        assert!(back.data().iter().all(|&v| v < 1.0));
        assert!((back.data()[3] - 0.75).abs() < 1.0 / 65535.0);
    }

    #[test]
    fn unwritable_path() {
        let w = Image::new(1, 1, 1, vec![0u32]).unwrap();
        assert!(matches!(
            write_winding_png(&w, Path::new("/nonexistent-dir/x.png")),
            Err(Error::Io { .. })
        ));
    }
}

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wrapcam::{CodecParams, Image, IrradianceImage};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, PartialEq)]
pub enum Shape {
    Smooth,
    PiecewiseSmooth,
}

/// Random field in the in-domain coordinate whose largest 4-neighbor step is
/// `max_step`, shifted so its minimum is `floor`.
pub fn random_domain_field(
    rng: &mut ChaCha8Rng,
    w: usize,
    h: usize,
    shape: Shape,
    max_step: f64,
    floor: f64,
) -> Vec<f64> {
    let (fw, fh) = (w as f64, h as f64);
    let gx: f64 = rng.random_range(-1.0..1.0);
    let gy: f64 = rng.random_range(-1.0..1.0);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..rng.random_range(1..4))
        .map(|_| {
            (
                rng.random_range(-1.0..3.0),
                rng.random_range(0.0..fw),
                rng.random_range(0.0..fh),
                rng.random_range(fw.min(fh) / 8.0..fw.min(fh) / 2.0),
            )
        })
        .collect();
    let (px, py, slope, jump) = (
        rng.random_range(0.2 * fw..0.8 * fw),
        rng.random_range(0.2 * fh..0.8 * fh),
        rng.random_range(-1.0..1.0),
        rng.random_range(0.5..1.0),
    );
    let (dx, dy, dr) = (
        rng.random_range(0.2 * fw..0.8 * fw),
        rng.random_range(0.2 * fh..0.8 * fh),
        rng.random_range(fw.min(fh) / 8.0..fw.min(fh) / 4.0),
    );
    let mut u: Vec<f64> = (0..w * h)
        .map(|i| {
            let (x, y) = ((i % w) as f64, (i / w) as f64);
            let mut v = gx * x / fw + gy * y / fh;
            for (a, cx, cy, s) in &blobs {
                v += a * (-((x - cx).powi(2) + (y - cy).powi(2)) / (2.0 * s * s)).exp();
            }
            if shape == Shape::PiecewiseSmooth {
                if x - px > slope * (y - py) {
                    v += 0.05 * jump;
                }
                if (x - dx).hypot(y - dy) < dr {
                    v -= 0.04;
                }
            }
            v
        })
        .collect();
    let mut steepest: f64 = 0.0;
    for y in 0..h {
        for x in 0..w {
            let v = u[y * w + x];
            if x + 1 < w {
                steepest = steepest.max((u[y * w + x + 1] - v).abs());
            }
            if y + 1 < h {
                steepest = steepest.max((u[(y + 1) * w + x] - v).abs());
            }
        }
    }
    let scale = if steepest > 0.0 {
        max_step / steepest
    } else {
        1.0
    };
    let min = u.iter().copied().fold(f64::INFINITY, f64::min);
    for v in u.iter_mut() {
        *v = (*v - min) * scale + floor;
    }
    u
}

/// Scene whose in-domain steps under `params` are all below `max_step`.
pub fn random_scene(
    rng: &mut ChaCha8Rng,
    w: usize,
    h: usize,
    shape: Shape,
    params: &CodecParams,
    max_step: f64,
) -> IrradianceImage {
    let u = random_domain_field(rng, w, h, shape, max_step, 0.05 * params.i_max);
    let data = u.iter().map(|&v| params.from_domain(v)).collect();
    IrradianceImage::from_image(Image::new(w, h, 1, data).unwrap()).unwrap()
}

pub fn max_relative_error(a: &IrradianceImage, b: &IrradianceImage) -> f64 {
    a.data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y).abs() / y.abs().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

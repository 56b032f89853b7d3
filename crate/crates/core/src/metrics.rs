//! Evaluation: Reinhard tonemapping, PSNR in the linear HDR domain, SSIM and
//! MS-SSIM on tonemapped images, and wrap counting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Image, IrradianceImage, WindingMap};

/// Global Reinhard operator `v / (1 + v)` with gamma 1 and unit intensity.
pub fn tonemap_reinhard(img: &IrradianceImage) -> IrradianceImage {
    IrradianceImage::from_image(img.as_image().map(|v| v / (1.0 + v)))
        .expect("v / (1 + v) of a non-negative finite value is in [0, 1)")
}

pub fn mse(a: &Image<f64>, b: &Image<f64>) -> Result<f64> {
    a.check_same_dims(b)?;
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum / a.len() as f64)
}

fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

fn resolve_peak(gt: &IrradianceImage, peak: Option<f64>) -> Result<f64> {
    let peak = peak.unwrap_or_else(|| gt.max_value());
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::InvalidParams(format!(
            "PSNR peak must be > 0, got {peak}"
        )));
    }
    Ok(peak)
}

/// `10·log10(peak² / MSE)`; identical images give `f64::INFINITY`.
/// The peak defaults to the maximum of the ground truth `gt`.
pub fn psnr(pred: &IrradianceImage, gt: &IrradianceImage, peak: Option<f64>) -> Result<f64> {
    let peak = resolve_peak(gt, peak)?;
    Ok(psnr_from_mse(mse(pred.as_image(), gt.as_image())?, peak))
}

const WINDOW: usize = 11;
const WINDOW_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;
/// Minimum side for the 5-scale MS-SSIM.
pub const MSSSIM_MIN_SIZE: usize = WINDOW << 4;
pub const MSSSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

fn gaussian_taps() -> [f64; WINDOW] {
    let mut taps = [0.0; WINDOW];
    let half = (WINDOW / 2) as f64;
    for (i, t) in taps.iter_mut().enumerate() {
        let d = i as f64 - half;
        *t = (-(d * d) / (2.0 * WINDOW_SIGMA * WINDOW_SIGMA)).exp();
    }
    let sum: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= sum);
    taps
}

/// Separable "valid" Gaussian filtering of a single plane.
fn filter_valid(
    plane: &[f64],
    w: usize,
    h: usize,
    taps: &[f64; WINDOW],
) -> (Vec<f64>, usize, usize) {
    let ow = w - WINDOW + 1;
    let oh = h - WINDOW + 1;
    let mut rows = vec![0.0; ow * h];
    for y in 0..h {
        for x in 0..ow {
            rows[y * ow + x] = (0..WINDOW).map(|k| taps[k] * plane[y * w + x + k]).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            out[y * ow + x] = (0..WINDOW).map(|k| taps[k] * rows[(y + k) * ow + x]).sum();
        }
    }
    (out, ow, oh)
}

/// Mean SSIM and mean contrast-structure term for one plane pair.
fn ssim_plane(a: &[f64], b: &[f64], w: usize, h: usize) -> (f64, f64) {
    let taps = gaussian_taps();
    let c1 = (K1 * 1.0) * (K1 * 1.0);
    let c2 = (K2 * 1.0) * (K2 * 1.0);
    let prod = |f: fn(f64, f64) -> f64| a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect::<Vec<_>>();
    let (mu_a, ow, oh) = filter_valid(a, w, h, &taps);
    let (mu_b, ..) = filter_valid(b, w, h, &taps);
    let (aa, ..) = filter_valid(&prod(|x, _| x * x), w, h, &taps);
    let (bb, ..) = filter_valid(&prod(|_, y| y * y), w, h, &taps);
    let (ab, ..) = filter_valid(&prod(|x, y| x * y), w, h, &taps);
    let n = (ow * oh) as f64;
    let mut ssim_sum = 0.0;
    let mut cs_sum = 0.0;
    for i in 0..ow * oh {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = aa[i] - ma * ma;
        let vb = bb[i] - mb * mb;
        let cov = ab[i] - ma * mb;
        let cs = (2.0 * cov + c2) / (va + vb + c2);
        cs_sum += cs;
        ssim_sum += (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1) * cs;
    }
    (ssim_sum / n, cs_sum / n)
}

fn check_pair(a: &IrradianceImage, b: &IrradianceImage, min: usize) -> Result<()> {
    a.as_image().check_same_dims(b.as_image())?;
    if a.width() < min || a.height() < min {
        return Err(Error::TooSmall(format!(
            "{}x{} is below the {min}x{min} minimum",
            a.width(),
            a.height()
        )));
    }
    Ok(())
}

/// SSIM of display-referred images (dynamic range 1), averaged over channels.
pub fn ssim(a: &IrradianceImage, b: &IrradianceImage) -> Result<f64> {
    Ok(ssim_per_channel(a, b)?.iter().sum::<f64>() / a.channels() as f64)
}

pub fn ssim_per_channel(a: &IrradianceImage, b: &IrradianceImage) -> Result<Vec<f64>> {
    check_pair(a, b, WINDOW)?;
    let (w, h, _) = a.dims();
    Ok((0..a.channels())
        .map(|c| {
            let pa = a.as_image().channel(c);
            let pb = b.as_image().channel(c);
            ssim_plane(pa.data(), pb.data(), w, h).0
        })
        .collect())
}

fn downsample(plane: &[f64], w: usize, h: usize) -> (Vec<f64>, usize, usize) {
    let (ow, oh) = (w / 2, h / 2);
    let mut out = Vec::with_capacity(ow * oh);
    for y in 0..oh {
        for x in 0..ow {
            let i = 2 * y * w + 2 * x;
            out.push(0.25 * (plane[i] + plane[i + 1] + plane[i + w] + plane[i + w + 1]));
        }
    }
    (out, ow, oh)
}

fn msssim_plane(a: &[f64], b: &[f64], w: usize, h: usize) -> f64 {
    let (mut a, mut b, mut w, mut h) = (a.to_vec(), b.to_vec(), w, h);
    let mut score = 1.0;
    for (scale, weight) in MSSSIM_WEIGHTS.iter().enumerate() {
        let (s, cs) = ssim_plane(&a, &b, w, h);
        let term = if scale + 1 == MSSSIM_WEIGHTS.len() {
            s
        } else {
            cs
        };
        score *= term.max(0.0).powf(*weight);
        if scale + 1 < MSSSIM_WEIGHTS.len() {
            let (na, nw, nh) = downsample(&a, w, h);
            b = downsample(&b, w, h).0;
            a = na;
            w = nw;
            h = nh;
        }
    }
    score
}

/// Five-scale MS-SSIM (2×2 box downsampling between scales), averaged over
/// channels. Negative per-scale terms are clamped to zero.
pub fn msssim(a: &IrradianceImage, b: &IrradianceImage) -> Result<f64> {
    Ok(msssim_per_channel(a, b)?.iter().sum::<f64>() / a.channels() as f64)
}

pub fn msssim_per_channel(a: &IrradianceImage, b: &IrradianceImage) -> Result<Vec<f64>> {
    check_pair(a, b, MSSSIM_MIN_SIZE)?;
    let (w, h, _) = a.dims();
    Ok((0..a.channels())
        .map(|c| {
            let pa = a.as_image().channel(c);
            let pb = b.as_image().channel(c);
            msssim_plane(pa.data(), pb.data(), w, h)
        })
        .collect())
}

/// Per-channel count of 4-neighbor boundaries where the winding changes.
pub fn wrap_count_per_channel(winding: &WindingMap) -> Vec<u64> {
    let (w, h, c) = winding.dims();
    let mut counts = vec![0u64; c];
    for y in 0..h {
        for x in 0..w {
            for (ch, n) in counts.iter_mut().enumerate() {
                let v = winding.get(x, y, ch);
                if x + 1 < w && winding.get(x + 1, y, ch) != v {
                    *n += 1;
                }
                if y + 1 < h && winding.get(x, y + 1, ch) != v {
                    *n += 1;
                }
            }
        }
    }
    counts
}

pub fn wrap_count(winding: &WindingMap) -> u64 {
    wrap_count_per_channel(winding).iter().sum()
}

/// Serializes `f64::INFINITY` as the string `"inf"`.
pub mod inf_sentinel {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Str(s) => Err(serde::de::Error::custom(format!(
                "expected number or \"inf\", got {s}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelEval {
    #[serde(with = "inf_sentinel")]
    pub psnr_db: f64,
    pub ssim: Option<f64>,
    pub msssim: Option<f64>,
    pub wrap_count: Option<u64>,
}

/// One evaluated reconstruction. SSIM/MS-SSIM are `None` when the image is
/// below their minimum size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    #[serde(with = "inf_sentinel")]
    pub psnr_db: f64,
    pub peak: f64,
    pub ssim: Option<f64>,
    pub msssim: Option<f64>,
    pub wrap_count: Option<u64>,
    pub per_channel: Vec<ChannelEval>,
}

/// PSNR on the linear images, SSIM and MS-SSIM on their Reinhard tonemaps.
pub fn evaluate(
    pred: &IrradianceImage,
    gt: &IrradianceImage,
    peak: Option<f64>,
    winding: Option<&WindingMap>,
) -> Result<EvalReport> {
    let peak = resolve_peak(gt, peak)?;
    let psnr_db = psnr(pred, gt, Some(peak))?;
    let (tp, tg) = (tonemap_reinhard(pred), tonemap_reinhard(gt));
    let ssim_c = ssim_per_channel(&tp, &tg).ok();
    let msssim_c = msssim_per_channel(&tp, &tg).ok();
    let wraps_c = winding.map(wrap_count_per_channel);
    let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;

    let per_channel = (0..gt.channels())
        .map(|c| -> Result<ChannelEval> {
            let pc = pred.as_image().channel(c);
            let gc = gt.as_image().channel(c);
            Ok(ChannelEval {
                psnr_db: psnr_from_mse(mse(&pc, &gc)?, peak),
                ssim: ssim_c.as_ref().map(|v| v[c]),
                msssim: msssim_c.as_ref().map(|v| v[c]),
                wrap_count: wraps_c.as_ref().and_then(|v| v.get(c).copied()),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EvalReport {
        psnr_db,
        peak,
        ssim: ssim_c.as_ref().map(mean),
        msssim: msssim_c.as_ref().map(mean),
        wrap_count: wraps_c.map(|v| v.iter().sum()),
        per_channel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> IrradianceImage {
        IrradianceImage::new(w, h, 1, (0..w * h).map(|i| f(i % w, i / w)).collect()).unwrap()
    }

    #[test]
    fn reinhard_values() {
        let t = tonemap_reinhard(&IrradianceImage::new(3, 1, 1, vec![0.0, 1.0, 3.0]).unwrap());
        assert_eq!(t.data(), &[0.0, 0.5, 0.75]);
    }

    #[test]
    fn psnr_closed_forms() {
        let a = gray(10, 10, |_, _| 0.5);
        assert_eq!(psnr(&a, &a, Some(1.0)).unwrap(), f64::INFINITY);
        let b = gray(10, 10, |_, _| 0.6);
        // MSE = 0.01 -> 20 dB
        assert!((psnr(&a, &b, Some(1.0)).unwrap() - 20.0).abs() < 1e-9);
        let zero = gray(4, 4, |_, _| 0.0);
        let full = gray(4, 4, |_, _| 2.0);
        assert!(psnr(&zero, &full, None).unwrap().abs() < 1e-12);
        assert!(psnr(&zero, &gray(5, 4, |_, _| 0.0), Some(1.0)).is_err());
        assert!(psnr(&full, &zero, None).is_err());
    }

    #[test]
    fn ssim_identity_and_inverse_checkerboard() {
        let x = gray(32, 32, |x, y| ((x + y) % 2) as f64);
        assert_eq!(ssim(&x, &x).unwrap(), 1.0);
        let inv = gray(32, 32, |x, y| 1.0 - ((x + y) % 2) as f64);
        assert!(ssim(&x, &inv).unwrap() < 0.1);
        assert!(ssim(&gray(10, 40, |_, _| 0.0), &gray(10, 40, |_, _| 0.0)).is_err());
    }

    #[test]
    fn msssim_identity_and_size() {
        let x = gray(176, 180, |x, y| ((x * 7 + y * 3) % 11) as f64 / 10.0);
        assert_eq!(msssim(&x, &x).unwrap(), 1.0);
        let small = gray(175, 200, |_, _| 0.0);
        assert!(matches!(msssim(&small, &small), Err(Error::TooSmall(_))));
    }

    #[test]
    fn wrap_counts() {
        let w = Image::new(5, 1, 1, vec![0u32, 0, 1, 1, 2]).unwrap();
        assert_eq!(wrap_count(&w), 2);
        assert_eq!(wrap_count(&Image::filled(4, 4, 3, 0u32).unwrap()), 0);
    }

    #[test]
    fn report_serializes_infinity() {
        let x = gray(12, 12, |x, _| x as f64);
        let r = evaluate(&x, &x, None, None).unwrap();
        assert_eq!(r.ssim, Some(1.0));
        assert!(r.msssim.is_none());
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"psnr_db\":\"inf\""));
        let back: EvalReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }
}

//! Forward in-pixel encodings and their inverse.
//!
//! Two wrapping schemes are supported. `Modulo` stores `I mod I_max` and
//! counts wraps linearly. `Mantissa` is the identity below `I_max` and stores
//! the fractional part of `log_α(I)` (modulo `I_max`) above it, so wraps are
//! spaced geometrically in irradiance.
//!
//! Internally both encodings are treated as plain modulo wrappings of an
//! *in-domain* coordinate `u = m + W·I_max` (see [`CodecParams::to_domain`]).
//! The winding solvers operate on `u` and never need to know which encoding
//! produced the sensor image.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{Image, IrradianceImage, WindingMap};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Modulo,
    Mantissa,
}

impl std::fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EncodingKind::Modulo => "modulo",
            EncodingKind::Mantissa => "mantissa",
        })
    }
}

impl std::str::FromStr for EncodingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "modulo" => Ok(EncodingKind::Modulo),
            "mantissa" => Ok(EncodingKind::Mantissa),
            other => Err(Error::InvalidParams(format!("unknown encoding '{other}'"))),
        }
    }
}

/// Everything the image formation model needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodecParams {
    pub kind: EncodingKind,
    /// Log base; only used by `Mantissa`.
    pub alpha: f64,
    /// Wrap period in sensor units.
    pub i_max: f64,
    /// Quantizer depth; 0 disables quantization.
    pub bits: u8,
    /// Standard deviation of additive read noise, sensor units.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for CodecParams {
    fn default() -> Self {
        Self {
            kind: EncodingKind::Mantissa,
            alpha: 2.0,
            i_max: 1.0,
            bits: 0,
            noise_sigma: 0.0,
            seed: 0,
        }
    }
}

impl CodecParams {
    pub fn modulo(i_max: f64) -> Self {
        Self {
            kind: EncodingKind::Modulo,
            i_max,
            ..Self::default()
        }
    }

    pub fn mantissa(alpha: f64, i_max: f64) -> Self {
        Self {
            kind: EncodingKind::Mantissa,
            alpha,
            i_max,
            ..Self::default()
        }
    }

    pub fn with_bits(mut self, bits: u8) -> Self {
        self.bits = bits;
        self
    }

    pub fn with_noise(mut self, sigma: f64, seed: u64) -> Self {
        self.noise_sigma = sigma;
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.i_max.is_finite() && self.i_max > 0.0) {
            return Err(Error::InvalidParams(format!(
                "i_max must be finite and > 0, got {}",
                self.i_max
            )));
        }
        if self.bits > 16 {
            return Err(Error::InvalidParams(format!(
                "bits must be in 0..=16, got {}",
                self.bits
            )));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "noise_sigma must be finite and >= 0, got {}",
                self.noise_sigma
            )));
        }
        if self.kind == EncodingKind::Mantissa {
            if !(self.alpha.is_finite() && self.alpha > 1.0) {
                return Err(Error::InvalidParams(format!(
                    "mantissa encoding needs alpha > 1, got {}",
                    self.alpha
                )));
            }
            // below 1 the log branch would produce non-positive windings
            if self.i_max < 1.0 {
                return Err(Error::InvalidParams(format!(
                    "mantissa encoding needs i_max >= 1, got {}",
                    self.i_max
                )));
            }
        }
        Ok(())
    }

    /// Largest sensor value strictly below `i_max`.
    pub fn below_i_max(&self) -> f64 {
        f64::from_bits(self.i_max.to_bits() - 1)
    }

    /// `log_α(v)`, exact for powers of two when `α = 2`.
    pub fn log_alpha(&self, v: f64) -> f64 {
        if self.alpha == 2.0 {
            v.log2()
        } else {
            v.ln() / self.alpha.ln()
        }
    }

    pub fn pow_alpha(&self, e: f64) -> f64 {
        if self.alpha == 2.0 {
            e.exp2()
        } else {
            self.alpha.powf(e)
        }
    }

    /// Maps irradiance to the in-domain coordinate `u`, whose plain
    /// `I_max`-modulo wrapping reproduces the encoding.
    pub fn to_domain(&self, irradiance: f64) -> f64 {
        match self.kind {
            EncodingKind::Modulo => irradiance,
            EncodingKind::Mantissa if irradiance < self.i_max => irradiance,
            EncodingKind::Mantissa => self.log_alpha(irradiance) + self.i_max,
        }
    }

    /// Inverse of [`to_domain`](Self::to_domain).
    pub fn from_domain(&self, u: f64) -> f64 {
        match self.kind {
            EncodingKind::Modulo => u,
            EncodingKind::Mantissa if u < self.i_max => u,
            EncodingKind::Mantissa => self.pow_alpha(u - self.i_max),
        }
    }

    /// Wraps one irradiance sample, returning `(m, W)`. No quantization or noise.
    pub fn wrap(&self, irradiance: f64) -> Result<(f64, u32)> {
        let (m, w) = match self.kind {
            EncodingKind::Modulo => {
                let m = irradiance % self.i_max;
                (m, ((irradiance - m) / self.i_max).round())
            }
            EncodingKind::Mantissa if irradiance < self.i_max => (irradiance, 0.0),
            EncodingKind::Mantissa => {
                let log = self.log_alpha(irradiance);
                let m = log.rem_euclid(self.i_max);
                (m, ((log - m) / self.i_max).round() + 1.0)
            }
        };
        if w > u32::MAX as f64 {
            return Err(Error::WindingOverflow {
                value: w as u64,
                limit: u32::MAX as u64,
            });
        }
        Ok((m, w as u32))
    }

    /// Inverse of [`wrap`](Self::wrap) for one sample.
    pub fn unwrap_value(&self, m: f64, w: u32) -> f64 {
        match self.kind {
            EncodingKind::Modulo => m + w as f64 * self.i_max,
            EncodingKind::Mantissa if w == 0 => m,
            EncodingKind::Mantissa => self.pow_alpha(m + (w - 1) as f64 * self.i_max),
        }
    }

    pub(crate) fn levels(&self) -> f64 {
        ((1u32 << self.bits) - 1) as f64
    }
}

/// Wrapped, quantized, noisy LDR observation together with the parameters
/// that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorImage {
    image: Image<f64>,
    params: CodecParams,
}

impl SensorImage {
    /// Wraps an externally obtained sample grid. Samples must lie in `[0, I_max]`.
    pub fn new(image: Image<f64>, params: CodecParams) -> Result<Self> {
        params.validate()?;
        if let Some(v) = image
            .data()
            .iter()
            .find(|v| !(v.is_finite() && **v >= 0.0 && **v <= params.i_max))
        {
            return Err(Error::InvalidImage(format!(
                "sensor sample {v} outside [0, {}]",
                params.i_max
            )));
        }
        Ok(Self { image, params })
    }

    pub fn image(&self) -> &Image<f64> {
        &self.image
    }

    pub fn params(&self) -> &CodecParams {
        &self.params
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.image.dims()
    }

    pub fn data(&self) -> &[f64] {
        self.image.data()
    }

    pub fn transpose(&self) -> Self {
        Self {
            image: self.image.transpose(),
            params: self.params,
        }
    }
}

/// Full output of the forward model.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub sensor: SensorImage,
    /// Wrapped values before quantization and noise.
    pub clean: SensorImage,
    /// Noiseless ground-truth winding numbers.
    pub winding: WindingMap,
}

/// Forward model: wrap, quantize, add noise.
pub fn encode(img: &IrradianceImage, params: &CodecParams) -> Result<(SensorImage, WindingMap)> {
    let Encoded {
        sensor, winding, ..
    } = encode_detailed(img, params)?;
    Ok((sensor, winding))
}

/// Like [`encode`] but also returns the pre-quantization wrapped image.
pub fn encode_detailed(img: &IrradianceImage, params: &CodecParams) -> Result<Encoded> {
    params.validate()?;
    let (w, h, c) = img.dims();
    let mut clean = Vec::with_capacity(img.data().len());
    let mut winding = Vec::with_capacity(img.data().len());
    for &v in img.data() {
        let (m, k) = params.wrap(v)?;
        clean.push(m);
        winding.push(k);
    }

    let mut observed = clean.clone();
    if params.bits > 0 {
        for m in observed.iter_mut() {
            *m = quantize_unchecked(*m, params.i_max, params.levels());
        }
    }
    if params.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let normal = Normal::new(0.0, params.noise_sigma)
            .map_err(|e| Error::InvalidParams(e.to_string()))?;
        let top = params.below_i_max();
        for m in observed.iter_mut() {
            *m = (*m + normal.sample(&mut rng)).clamp(0.0, top);
        }
    }

    Ok(Encoded {
        sensor: SensorImage {
            image: Image::new(w, h, c, observed)?,
            params: *params,
        },
        clean: SensorImage {
            image: Image::new(w, h, c, clean)?,
            params: *params,
        },
        winding: Image::new(w, h, c, winding)?,
    })
}

/// Inverse model: combine wrapped values with winding numbers.
pub fn reconstruct(sensor: &SensorImage, winding: &WindingMap) -> Result<IrradianceImage> {
    sensor.image.check_same_dims(winding)?;
    let p = &sensor.params;
    let data = sensor
        .data()
        .iter()
        .zip(winding.data())
        .map(|(&m, &w)| p.unwrap_value(m, w))
        .collect();
    let (w, h, c) = sensor.dims();
    IrradianceImage::new(w, h, c, data)
}

fn quantize_unchecked(value: f64, i_max: f64, levels: f64) -> f64 {
    (value * levels / i_max).round() * i_max / levels
}

/// Uniform mid-tread quantizer with `2^bits` levels over `[0, i_max]`,
/// top code inclusive.
pub fn quantize(value: f64, i_max: f64, bits: u8) -> Result<f64> {
    if !(1..=16).contains(&bits) {
        return Err(Error::InvalidParams(format!(
            "bits must be in 1..=16, got {bits}"
        )));
    }
    if !(i_max.is_finite() && i_max > 0.0) {
        return Err(Error::InvalidParams(format!(
            "i_max must be > 0, got {i_max}"
        )));
    }
    if !(0.0..=i_max).contains(&value) {
        return Err(Error::OutOfRange { value, i_max });
    }
    Ok(quantize_unchecked(
        value,
        i_max,
        ((1u32 << bits) - 1) as f64,
    ))
}

/// Quantization error characteristics for one winding window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantizationBounds {
    /// Spacing between adjacent reconstructible irradiance levels. For the
    /// mantissa encoding this is reported at the window midpoint.
    pub absolute_step: f64,
    /// Worst-case relative spacing inside the window; infinite for the window
    /// that contains zero.
    pub max_relative_error: f64,
}

pub fn quantization_error_bounds(params: &CodecParams, winding: u32) -> Result<QuantizationBounds> {
    params.validate()?;
    if params.bits == 0 {
        return Err(Error::QuantizerDisabled);
    }
    let step = params.i_max / params.levels();
    Ok(match params.kind {
        EncodingKind::Modulo => QuantizationBounds {
            absolute_step: step,
            max_relative_error: if winding == 0 {
                f64::INFINITY
            } else {
                step / (winding as f64 * params.i_max)
            },
        },
        EncodingKind::Mantissa if winding == 0 => QuantizationBounds {
            absolute_step: step,
            max_relative_error: f64::INFINITY,
        },
        EncodingKind::Mantissa => {
            let rel = params.pow_alpha(step) - 1.0;
            let mid = params.pow_alpha((winding - 1) as f64 * params.i_max + params.i_max / 2.0);
            QuantizationBounds {
                absolute_step: mid * rel,
                max_relative_error: rel,
            }
        }
    })
}

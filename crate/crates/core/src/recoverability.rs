//! Pairwise recoverability conditions, the greedy sequential unwrapper and
//! the resolution/dynamic-range tradeoff formulas.

use serde::{Deserialize, Serialize};

use crate::codec::{CodecParams, EncodingKind};
use crate::error::{Error, Result};
use crate::image::IrradianceImage;

/// A sample position `(x, y, channel)`.
pub type Site = (usize, usize, usize);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub a: Site,
    pub b: Site,
    /// In-domain difference magnitude (irradiance for modulo, log for mantissa).
    pub delta: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoverabilityReport {
    pub total_pairs: usize,
    pub violations: Vec<Violation>,
    pub satisfied: bool,
}

/// Distance used by the pairwise condition: `|ΔI|` for modulo, and the
/// log-domain distance with sub-`I_max` samples pinned to `I_max` for mantissa.
pub fn pair_delta(params: &CodecParams, a: f64, b: f64) -> f64 {
    match params.kind {
        EncodingKind::Modulo => (b - a).abs(),
        EncodingKind::Mantissa => {
            let la = params.log_alpha(a.max(params.i_max));
            let lb = params.log_alpha(b.max(params.i_max));
            (lb - la).abs()
        }
    }
}

/// True when a single adjacent pair can be unwrapped without ambiguity.
pub fn pair_recoverable(params: &CodecParams, a: f64, b: f64) -> bool {
    pair_delta(params, a, b) <= params.i_max
}

/// Checks every horizontally and vertically adjacent pair, per channel.
pub fn check_recoverable(
    img: &IrradianceImage,
    params: &CodecParams,
) -> Result<RecoverabilityReport> {
    params.validate()?;
    let (w, h, c) = img.dims();
    let mut total_pairs = 0;
    let mut violations = Vec::new();
    let mut visit = |a: Site, b: Site| {
        total_pairs += 1;
        let delta = pair_delta(params, img.get(a.0, a.1, a.2), img.get(b.0, b.1, b.2));
        if delta > params.i_max {
            violations.push(Violation {
                a,
                b,
                delta,
                bound: params.i_max,
            });
        }
    };
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                if x + 1 < w {
                    visit((x, y, ch), (x + 1, y, ch));
                }
                if y + 1 < h {
                    visit((x, y, ch), (x, y + 1, ch));
                }
            }
        }
    }
    Ok(RecoverabilityReport {
        total_pairs,
        satisfied: violations.is_empty(),
        violations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequentialUnwrap {
    /// Reconstructed irradiance.
    pub values: Vec<f64>,
    pub windings: Vec<u32>,
    /// Indices whose step was exactly `I_max / 2` (tie resolved as no wrap).
    pub ambiguous: Vec<usize>,
}

/// Greedy nearest-continuation unwrapping of a 1D wrapped sequence.
///
/// Exact whenever every in-domain step is smaller than `I_max / 2` and
/// `first_winding` is the true winding of the first sample.
pub fn unwrap_sequential_1d(
    wrapped: &[f64],
    params: &CodecParams,
    first_winding: u32,
) -> Result<SequentialUnwrap> {
    params.validate()?;
    let period = params.i_max;
    let mut windings = Vec::with_capacity(wrapped.len());
    let mut values = Vec::with_capacity(wrapped.len());
    let mut ambiguous = Vec::new();

    let mut winding = first_winding as i64;
    let mut prev_u = 0.0;
    for (n, &m) in wrapped.iter().enumerate() {
        if n > 0 {
            let dist = |k: i64| (m + (winding + k) as f64 * period - prev_u).abs();
            let (d_down, d_keep, d_up) = (dist(-1), dist(0), dist(1));
            let mut k = 0;
            if d_up < d_keep && d_up <= d_down {
                k = 1;
            } else if d_down < d_keep {
                k = -1;
            }
            if (d_up == d_keep || d_down == d_keep) && k == 0 {
                ambiguous.push(n);
            }
            winding += k;
            if winding < 0 {
                return Err(Error::NegativeWinding { index: n });
            }
        }
        let u = m + winding as f64 * period;
        prev_u = u;
        windings.push(winding as u32);
        values.push(params.unwrap_value(m, winding as u32));
    }
    Ok(SequentialUnwrap {
        values,
        windings,
        ambiguous,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicRangeEstimate {
    pub kind: EncodingKind,
    pub n_pixels: usize,
    pub i_max: f64,
    pub dr_db: f64,
}

/// Maximum dynamic range recoverable by an `n_pixels` sensor when the scene
/// is the steepest admissible ramp.
pub fn max_dynamic_range(
    kind: EncodingKind,
    n_pixels: usize,
    i_max: f64,
) -> Result<DynamicRangeEstimate> {
    if n_pixels < 2 {
        return Err(Error::InvalidParams(format!(
            "dynamic range needs at least 2 pixels, got {n_pixels}"
        )));
    }
    if !(i_max.is_finite() && i_max > 0.0) {
        return Err(Error::InvalidParams(format!(
            "i_max must be > 0, got {i_max}"
        )));
    }
    let n = n_pixels as f64;
    let dr_db = match kind {
        EncodingKind::Modulo => 10.0 * (n * i_max).log10(),
        EncodingKind::Mantissa => {
            if i_max <= 1.0 {
                return Err(Error::InvalidParams(format!(
                    "mantissa dynamic-range formula 10·N·log10(I_max) degenerates for I_max = {i_max} <= 1"
                )));
            }
            10.0 * n * i_max.log10()
        }
    };
    Ok(DynamicRangeEstimate {
        kind,
        n_pixels,
        i_max,
        dr_db,
    })
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::IrradianceImage;

/// Per-channel counts over log10-spaced bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogHistogram {
    /// `log10` of the smallest positive and the largest sample; `None` when
    /// every sample is zero.
    pub log10_range: Option<(f64, f64)>,
    /// `counts[channel][bin]`.
    pub counts: Vec<Vec<u64>>,
    /// Exact zeros per channel, kept out of the log bins.
    pub zeros: Vec<u64>,
}

impl LogHistogram {
    pub fn n_bins(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    /// Lower edge of each bin in linear units, plus the final upper edge.
    pub fn edges(&self) -> Vec<f64> {
        match self.log10_range {
            None => Vec::new(),
            Some((lo, hi)) => {
                let n = self.n_bins();
                (0..=n)
                    .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / n as f64))
                    .collect()
            }
        }
    }

    /// Index of the bin holding the median positive sample of channel `c`.
    pub fn median_bin(&self, c: usize) -> Option<usize> {
        let total: u64 = self.counts[c].iter().sum();
        if total == 0 {
            return None;
        }
        let mut acc = 0;
        self.counts[c].iter().position(|&n| {
            acc += n;
            2 * acc >= total
        })
    }
}

pub fn log_histogram(img: &IrradianceImage, n_bins: usize) -> Result<LogHistogram> {
    if n_bins < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 bins, got {n_bins}"
        )));
    }
    let c = img.channels();
    let mut counts = vec![vec![0u64; n_bins]; c];
    let mut zeros = vec![0u64; c];
    let min_pos = img
        .data()
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min_pos.is_finite() {
        for (i, _) in img.data().iter().enumerate() {
            zeros[i % c] += 1;
        }
        return Ok(LogHistogram {
            log10_range: None,
            counts,
            zeros,
        });
    }
    let lo = min_pos.log10();
    let hi = img.max_value().log10();
    let span = hi - lo;
    for (i, &v) in img.data().iter().enumerate() {
        if v == 0.0 {
            zeros[i % c] += 1;
            continue;
        }
        let bin = if span > 0.0 {
            (((v.log10() - lo) / span * n_bins as f64) as usize).min(n_bins - 1)
        } else {
            0
        };
        counts[i % c][bin] += 1;
    }
    Ok(LogHistogram {
        log10_range: Some((lo, hi)),
        counts,
        zeros,
    })
}

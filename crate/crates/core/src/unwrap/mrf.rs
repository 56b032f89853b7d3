//! Multi-label MRF winding recovery by alpha-expansion.
//!
//! Energy: `E(W) = λ · Σ_{p~q} min(|u_p − u_q|, trunc)` with the in-domain
//! value `u = m + W·I_max` and uniform data terms. Each expansion move is a
//! binary problem solved exactly by min-cut.

use serde::{Deserialize, Serialize};

use super::edges::detect_wrap_edges;
use super::floodfill::{unwrap_floodfill, FloodFillReport};
use super::maxflow::BinaryEnergy;
use crate::codec::{CodecParams, SensorImage};
use crate::error::{Error, Result};
use crate::image::{Image, WindingMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MrfConfig {
    /// Highest winding label considered.
    pub max_label: u32,
    pub lambda: f64,
    /// Truncation of the pairwise potential, sensor units.
    pub trunc: f64,
    pub max_sweeps: usize,
    /// Edge threshold for the flood-fill initialization; `None` = `I_max / 2`.
    pub tau: Option<f64>,
}

impl Default for MrfConfig {
    fn default() -> Self {
        Self {
            max_label: 16,
            lambda: 1.0,
            trunc: 2.0,
            max_sweeps: 5,
            tau: None,
        }
    }
}

impl MrfConfig {
    /// Defaults scaled to a codec's wrap period.
    pub fn for_params(params: &CodecParams) -> Self {
        Self {
            trunc: 2.0 * params.i_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_label < 1 {
            return Err(Error::InvalidParams("max_label must be >= 1".into()));
        }
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::InvalidParams(format!(
                "lambda must be > 0, got {}",
                self.lambda
            )));
        }
        if !(self.trunc.is_finite() && self.trunc > 0.0) {
            return Err(Error::InvalidParams(format!(
                "trunc must be > 0, got {}",
                self.trunc
            )));
        }
        if self.max_sweeps < 1 {
            return Err(Error::InvalidParams("max_sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MrfReport {
    /// Energy of the initial labeling followed by the energy after each sweep.
    pub energy_trace: Vec<f64>,
    /// Initial labels above `max_label` that had to be clamped.
    pub ceiling_clamped: usize,
    /// Final boundaries whose in-domain jump still exceeds `I_max / 2`.
    pub residual_edges: usize,
    pub init: FloodFillReport,
}

struct Problem<'a> {
    sensor: &'a [f64],
    pairs: Vec<(usize, usize)>,
    i_max: f64,
    lambda: f64,
    trunc: f64,
}

impl Problem<'_> {
    fn new<'a>(sensor: &'a SensorImage, config: &MrfConfig) -> Problem<'a> {
        let (w, h, c) = sensor.dims();
        let img = sensor.image();
        let mut pairs = Vec::with_capacity(2 * w * h * c);
        for y in 0..h {
            for x in 0..w {
                for ch in 0..c {
                    let i = img.index(x, y, ch);
                    if x + 1 < w {
                        pairs.push((i, img.index(x + 1, y, ch)));
                    }
                    if y + 1 < h {
                        pairs.push((i, img.index(x, y + 1, ch)));
                    }
                }
            }
        }
        Problem {
            sensor: sensor.data(),
            pairs,
            i_max: sensor.params().i_max,
            lambda: config.lambda,
            trunc: config.trunc,
        }
    }

    #[inline]
    fn potential(&self, p: usize, lp: u32, q: usize, lq: u32) -> f64 {
        let d = self.sensor[p] - self.sensor[q] + (lp as f64 - lq as f64) * self.i_max;
        self.lambda * d.abs().min(self.trunc)
    }

    fn energy(&self, labels: &[u32]) -> f64 {
        self.pairs
            .iter()
            .map(|&(p, q)| self.potential(p, labels[p], q, labels[q]))
            .sum()
    }

    /// One expansion move towards `alpha`; returns the proposed labeling.
    fn expand(&self, labels: &[u32], alpha: u32) -> Vec<u32> {
        let mut var = vec![usize::MAX; labels.len()];
        let mut n = 0;
        for (i, &l) in labels.iter().enumerate() {
            if l != alpha {
                var[i] = n;
                n += 1;
            }
        }
        if n == 0 {
            return labels.to_vec();
        }
        let mut energy = BinaryEnergy::new(n);
        for &(p, q) in &self.pairs {
            let (lp, lq) = (labels[p], labels[q]);
            match (var[p] != usize::MAX, var[q] != usize::MAX) {
                (false, false) => {}
                (true, false) => energy.add_unary(
                    var[p],
                    self.potential(p, lp, q, alpha),
                    self.potential(p, alpha, q, alpha),
                ),
                (false, true) => energy.add_unary(
                    var[q],
                    self.potential(p, alpha, q, lq),
                    self.potential(p, alpha, q, alpha),
                ),
                (true, true) => {
                    let a = self.potential(p, lp, q, lq);
                    let b = self.potential(p, lp, q, alpha);
                    let mut c = self.potential(p, alpha, q, lq);
                    let d = self.potential(p, alpha, q, alpha);
                    // majorize non-submodular terms; exact at the current labeling
                    if b + c < a + d {
                        c = a + d - b;
                    }
                    energy.add_pairwise(var[p], var[q], a, b, c, d);
                }
            }
        }
        let (switch, _) = energy.minimize();
        labels
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                if var[i] != usize::MAX && switch[var[i]] {
                    alpha
                } else {
                    l
                }
            })
            .collect()
    }

    fn residual_edges(&self, labels: &[u32]) -> usize {
        self.pairs
            .iter()
            .filter(|&&(p, q)| {
                let d = self.sensor[p] - self.sensor[q]
                    + (labels[p] as f64 - labels[q] as f64) * self.i_max;
                d.abs() > self.i_max / 2.0
            })
            .count()
    }
}

/// Energy of a labeling under `config`.
pub fn mrf_energy(sensor: &SensorImage, winding: &WindingMap, config: &MrfConfig) -> Result<f64> {
    sensor.image().check_same_dims(winding)?;
    Ok(Problem::new(sensor, config).energy(winding.data()))
}

/// Alpha-expansion starting from the flood-fill labeling.
pub fn unwrap_mrf(sensor: &SensorImage, config: &MrfConfig) -> Result<(WindingMap, MrfReport)> {
    config.validate()?;
    let tau = config.tau.unwrap_or(sensor.params().i_max / 2.0);
    let edges = detect_wrap_edges(sensor, tau)?;
    let (init, ff) = unwrap_floodfill(sensor, &edges)?;
    let (winding, mut report) = unwrap_mrf_from(sensor, config, &init)?;
    report.init = ff;
    Ok((winding, report))
}

/// Alpha-expansion from an arbitrary initial labeling.
pub fn unwrap_mrf_from(
    sensor: &SensorImage,
    config: &MrfConfig,
    init: &WindingMap,
) -> Result<(WindingMap, MrfReport)> {
    config.validate()?;
    sensor.image().check_same_dims(init)?;
    let problem = Problem::new(sensor, config);
    let mut report = MrfReport::default();

    let mut labels: Vec<u32> = init
        .data()
        .iter()
        .map(|&l| {
            if l > config.max_label {
                report.ceiling_clamped += 1;
                config.max_label
            } else {
                l
            }
        })
        .collect();
    if report.ceiling_clamped > 0 {
        log::warn!(
            "{} samples exceed the label ceiling {}",
            report.ceiling_clamped,
            config.max_label
        );
    }

    let mut current = problem.energy(&labels);
    report.energy_trace.push(current);
    for _ in 0..config.max_sweeps {
        let mut improved = false;
        for alpha in 0..=config.max_label {
            let proposal = problem.expand(&labels, alpha);
            let e = problem.energy(&proposal);
            if e < current - 1e-9 * current.abs().max(1.0) {
                labels = proposal;
                current = e;
                improved = true;
            }
        }
        report.energy_trace.push(current);
        if !improved {
            break;
        }
    }
    report.residual_edges = problem.residual_edges(&labels);

    let (w, h, c) = sensor.dims();
    Ok((Image::new(w, h, c, labels)?, report))
}

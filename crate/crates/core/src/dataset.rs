//! Supervised dataset synthesis: exposure-scaled, randomly cropped HDR
//! sources pushed through the forward model, paired with ground-truth
//! winding maps and wrap-edge masks.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{encode_detailed, CodecParams, SensorImage};
use crate::error::{Error, Result};
use crate::image::{IrradianceImage, WindingMap};
use crate::io;
use crate::scene::{generate_scene, SceneSpec};
use crate::unwrap::WrapEdgeMask;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DatasetSource {
    Path(PathBuf),
    Scene(SceneSpec),
}

impl DatasetSource {
    pub fn id(&self) -> String {
        match self {
            DatasetSource::Path(p) => p.display().to_string(),
            DatasetSource::Scene(s) => s.id(),
        }
    }

    fn load(&self) -> Result<IrradianceImage> {
        match self {
            DatasetSource::Path(p) => io::read_hdr(p),
            DatasetSource::Scene(s) => generate_scene(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub exposure_factors: Vec<f64>,
    /// Crop size `(width, height)`.
    pub crop: (usize, usize),
    pub crops_per_image: usize,
    pub seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            exposure_factors: vec![1.0, 2.0, 4.0, 8.0],
            crop: (256, 256),
            crops_per_image: 1,
            seed: 0,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.exposure_factors.is_empty()
            || self
                .exposure_factors
                .iter()
                .any(|f| !(f.is_finite() && *f > 0.0))
        {
            return Err(Error::InvalidParams(
                "exposure factors must be a non-empty list of positive numbers".into(),
            ));
        }
        if self.crop.0 == 0 || self.crop.1 == 0 || self.crops_per_image == 0 {
            return Err(Error::InvalidParams(
                "crop size and count must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DatasetRecord {
    pub index: usize,
    pub source_id: String,
    pub exposure_factor: f64,
    /// Top-left corner of the crop in source pixels.
    pub crop_origin: (usize, usize),
    pub sensor: SensorImage,
    /// Wrapped values before quantization and noise.
    pub clean: SensorImage,
    pub winding: WindingMap,
    pub edges: WrapEdgeMask,
    /// The scaled, cropped irradiance the record was made from.
    pub target: IrradianceImage,
}

/// Derives the noise seed of one record so records are independent.
pub fn record_seed(base: u64, index: usize) -> u64 {
    base ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn source_rng(seed: u64, source_index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(
        seed.wrapping_add((source_index as u64).wrapping_mul(0xD1B5_4A32_D192_ED03)),
    )
}

/// All records of a single source. Record indices start at `first_index`.
pub fn records_for_source(
    source: &DatasetSource,
    source_index: usize,
    first_index: usize,
    params: &CodecParams,
    aug: &AugmentConfig,
) -> Result<Vec<DatasetRecord>> {
    let img = source.load()?;
    let (cw, ch) = aug.crop;
    if cw > img.width() || ch > img.height() {
        return Err(Error::TooSmall(format!(
            "{}: {}x{} is smaller than the {cw}x{ch} crop",
            source.id(),
            img.width(),
            img.height()
        )));
    }
    let mut rng = source_rng(aug.seed, source_index);
    let mut out = Vec::with_capacity(aug.exposure_factors.len() * aug.crops_per_image);
    for &factor in &aug.exposure_factors {
        for _ in 0..aug.crops_per_image {
            let x0 = rng.random_range(0..=img.width() - cw);
            let y0 = rng.random_range(0..=img.height() - ch);
            let index = first_index + out.len();
            let target = img.crop(x0, y0, cw, ch)?.scaled(factor)?;
            let mut p = *params;
            p.seed = record_seed(params.seed, index);
            let enc = encode_detailed(&target, &p)?;
            out.push(DatasetRecord {
                index,
                source_id: source.id(),
                exposure_factor: factor,
                crop_origin: (x0, y0),
                edges: WrapEdgeMask::from_winding(&enc.winding),
                sensor: enc.sensor,
                clean: enc.clean,
                winding: enc.winding,
                target,
            });
        }
    }
    Ok(out)
}

/// Lazily synthesizes records source by source. Unusable sources are
/// skipped and remembered in [`skipped`](Self::skipped).
pub struct DatasetStream<'a> {
    sources: &'a [DatasetSource],
    params: CodecParams,
    aug: AugmentConfig,
    next_source: usize,
    next_index: usize,
    pending: std::vec::IntoIter<DatasetRecord>,
    skipped: Vec<(String, String)>,
}

impl<'a> DatasetStream<'a> {
    pub fn new(
        sources: &'a [DatasetSource],
        params: &CodecParams,
        aug: &AugmentConfig,
    ) -> Result<Self> {
        params.validate()?;
        aug.validate()?;
        Ok(Self {
            sources,
            params: *params,
            aug: aug.clone(),
            next_source: 0,
            next_index: 0,
            pending: Vec::new().into_iter(),
            skipped: Vec::new(),
        })
    }

    /// `(source id, reason)` for every skipped source so far.
    pub fn skipped(&self) -> &[(String, String)] {
        &self.skipped
    }

    pub fn emitted(&self) -> usize {
        self.next_index
    }
}

impl Iterator for DatasetStream<'_> {
    type Item = DatasetRecord;

    fn next(&mut self) -> Option<DatasetRecord> {
        loop {
            if let Some(r) = self.pending.next() {
                return Some(r);
            }
            let src = self.sources.get(self.next_source)?;
            let si = self.next_source;
            self.next_source += 1;
            match records_for_source(src, si, self.next_index, &self.params, &self.aug) {
                Ok(records) => {
                    self.next_index += records.len();
                    self.pending = records.into_iter();
                }
                Err(e) => {
                    log::warn!("skipping source {}: {e}", src.id());
                    self.skipped.push((src.id(), e.to_string()));
                }
            }
        }
    }
}

/// Collects the whole dataset; fails if nothing could be produced.
pub fn synthesize_dataset(
    sources: &[DatasetSource],
    params: &CodecParams,
    aug: &AugmentConfig,
) -> Result<Vec<DatasetRecord>> {
    let mut stream = DatasetStream::new(sources, params, aug)?;
    let records: Vec<_> = stream.by_ref().collect();
    if records.is_empty() {
        return Err(Error::EmptyDataset {
            skipped: stream.skipped().len(),
        });
    }
    Ok(records)
}

/// One manifest line describing a record written to disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub index: usize,
    pub source_id: String,
    pub exposure_factor: f64,
    pub crop_origin: (usize, usize),
    pub crop_size: (usize, usize),
    pub params: CodecParams,
    pub sensor_png: String,
    pub sensor_pfm: String,
    pub clean_pfm: String,
    pub target_pfm: String,
    pub winding_png: String,
    pub edges_png: String,
}

/// Writes a record's files into `dir` and returns its manifest entry.
/// Paths in the entry are relative to `dir`.
pub fn write_record(record: &DatasetRecord, dir: &Path) -> Result<ManifestEntry> {
    let stem = format!("rec_{:06}", record.index);
    let name = |suffix: &str| format!("{stem}_{suffix}");
    let entry = ManifestEntry {
        index: record.index,
        source_id: record.source_id.clone(),
        exposure_factor: record.exposure_factor,
        crop_origin: record.crop_origin,
        crop_size: (record.sensor.dims().0, record.sensor.dims().1),
        params: *record.sensor.params(),
        sensor_png: name("sensor.png"),
        sensor_pfm: name("sensor.pfm"),
        clean_pfm: name("clean.pfm"),
        target_pfm: name("target.pfm"),
        winding_png: name("winding.png"),
        edges_png: name("edges.png"),
    };
    io::write_sensor_png(&record.sensor, &dir.join(&entry.sensor_png))?;
    io::write_pfm(record.sensor.image(), &dir.join(&entry.sensor_pfm))?;
    io::write_pfm(record.clean.image(), &dir.join(&entry.clean_pfm))?;
    io::write_hdr(&record.target, dir.join(&entry.target_pfm))?;
    io::write_winding_png(&record.winding, &dir.join(&entry.winding_png))?;
    io::write_edges_png(&record.edges, &dir.join(&entry.edges_png))?;
    Ok(entry)
}

//! Sidecar metadata written next to an encoded sensor image.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use wrapcam::CodecParams;

pub const FORMAT: &str = "wrapcam-sensor";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorMeta {
    pub format: String,
    pub version: u32,
    pub params: CodecParams,
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    /// Input the sensor image was made from.
    pub source: String,
    /// File names relative to the sidecar's directory.
    pub sensor_png: String,
    pub sensor_pfm: String,
    pub winding_png: String,
    pub max_winding: u32,
    pub wrap_count: u64,
}

impl SensorMeta {
    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read metadata sidecar {}", path.display()))?;
        let meta: SensorMeta = serde_json::from_str(&text)
            .with_context(|| format!("malformed metadata sidecar {}", path.display()))?;
        if meta.format != FORMAT || meta.version != VERSION {
            return Err(wrapcam::Error::format(
                path,
                wrapcam::FormatErrorKind::Unsupported,
                format!("sidecar format {} v{}", meta.format, meta.version),
            )
            .into());
        }
        meta.params
            .validate()
            .with_context(|| format!("invalid parameters in sidecar {}", path.display()))?;
        Ok(meta)
    }

    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

/// `meta.json` beside the sensor file.
pub fn default_sidecar(sensor: &Path) -> PathBuf {
    sensor.with_file_name("meta.json")
}

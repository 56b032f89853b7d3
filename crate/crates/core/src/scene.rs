//! Analytic test scenes.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::IrradianceImage;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blob {
    pub amplitude: f64,
    pub center: (f64, f64),
    pub sigma: f64,
}

impl Blob {
    fn eval(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (x - self.center.0, y - self.center.1);
        self.amplitude * (-(dx * dx + dy * dy) / (2.0 * self.sigma * self.sigma)).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SceneSpec {
    /// `n` samples rising linearly from 0 to `amplitude`.
    Ramp1d {
        amplitude: f64,
        n: usize,
    },
    /// `amplitude · (x + y) / (width + height − 2)`.
    Ramp2d {
        amplitude: f64,
        width: usize,
        height: usize,
    },
    Gaussian {
        width: usize,
        height: usize,
        blob: Blob,
    },
    /// `offset + gx·x + gy·y + Σ blobs`.
    GaussianMixture {
        width: usize,
        height: usize,
        blobs: Vec<Blob>,
        offset: f64,
        gradient: (f64, f64),
    },
    FromFile {
        path: PathBuf,
    },
}

impl SceneSpec {
    /// A centered Gaussian on a `size`×`size` grid.
    pub fn centered_gaussian(size: usize, amplitude: f64, sigma: f64) -> Self {
        let c = (size as f64 - 1.0) / 2.0;
        SceneSpec::Gaussian {
            width: size,
            height: size,
            blob: Blob {
                amplitude,
                center: (c, c),
                sigma,
            },
        }
    }

    /// Short human-readable identifier used as dataset provenance.
    pub fn id(&self) -> String {
        match self {
            SceneSpec::Ramp1d { amplitude, n } => format!("ramp1d-a{amplitude}-n{n}"),
            SceneSpec::Ramp2d {
                amplitude,
                width,
                height,
            } => format!("ramp2d-a{amplitude}-{width}x{height}"),
            SceneSpec::Gaussian {
                width,
                height,
                blob,
            } => {
                format!(
                    "gaussian-a{}-s{}-{width}x{height}",
                    blob.amplitude, blob.sigma
                )
            }
            SceneSpec::GaussianMixture {
                width,
                height,
                blobs,
                ..
            } => format!("mixture-{}-{width}x{height}", blobs.len()),
            SceneSpec::FromFile { path } => path.display().to_string(),
        }
    }
}

fn check_blob(b: &Blob) -> Result<()> {
    if !(b.amplitude > 0.0 && b.amplitude.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "amplitude must be > 0, got {}",
            b.amplitude
        )));
    }
    if !(b.sigma > 0.0 && b.sigma.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "sigma must be > 0, got {}",
            b.sigma
        )));
    }
    Ok(())
}

fn grid(width: usize, height: usize, f: impl Fn(f64, f64) -> f64) -> Result<IrradianceImage> {
    let data = (0..width * height)
        .map(|i| f((i % width) as f64, (i / width) as f64))
        .collect();
    IrradianceImage::new(width, height, 1, data)
}

pub fn generate_scene(spec: &SceneSpec) -> Result<IrradianceImage> {
    match spec {
        SceneSpec::Ramp1d { amplitude, n } => {
            if !(*amplitude > 0.0) || *n < 2 {
                return Err(Error::InvalidParams(
                    "ramp needs amplitude > 0 and n >= 2".into(),
                ));
            }
            let step = amplitude / (*n as f64 - 1.0);
            grid(*n, 1, |x, _| x * step)
        }
        SceneSpec::Ramp2d {
            amplitude,
            width,
            height,
        } => {
            if !(*amplitude > 0.0) || width + height < 3 {
                return Err(Error::InvalidParams(
                    "2D ramp needs amplitude > 0 and at least two pixels".into(),
                ));
            }
            let span = (width + height - 2) as f64;
            grid(*width, *height, |x, y| amplitude * (x + y) / span)
        }
        SceneSpec::Gaussian {
            width,
            height,
            blob,
        } => {
            check_blob(blob)?;
            grid(*width, *height, |x, y| blob.eval(x, y))
        }
        SceneSpec::GaussianMixture {
            width,
            height,
            blobs,
            offset,
            gradient,
        } => {
            blobs.iter().try_for_each(check_blob)?;
            grid(*width, *height, |x, y| {
                offset
                    + gradient.0 * x
                    + gradient.1 * y
                    + blobs.iter().map(|b| b.eval(x, y)).sum::<f64>()
            })
        }
        SceneSpec::FromFile { path } => crate::io::read_hdr(path),
    }
}

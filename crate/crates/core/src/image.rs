//! Pixel containers shared by every stage of the pipeline.
//!
//! All images are row-major with interleaved channels: sample `(x, y, c)`
//! lives at `(y * width + x) * channels + c`.

use crate::error::{Error, Result};

/// A dense, row-major, channel-interleaved grid of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T> {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<T>,
}

impl<T: Copy> Image<T> {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be >= 1, got {width}x{height}"
            )));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidImage(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidImage(format!(
                "data length {} != {width}x{height}x{channels}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, channels: usize, value: T) -> Result<Self> {
        Self::new(
            width,
            height,
            channels,
            vec![value; width * height * channels],
        )
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, c: usize) -> usize {
        (y * self.width + x) * self.channels + c
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> T {
        self.data[self.index(x, y, c)]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: usize, v: T) {
        let i = self.index(x, y, c);
        self.data[i] = v;
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> Image<U> {
        Image {
            width: self.width,
            height: self.height,
            channels: self.channels,
            data: self.data.iter().copied().map(f).collect(),
        }
    }

    /// Extracts one channel as a single-channel image.
    pub fn channel(&self, c: usize) -> Image<T> {
        let data = self
            .data
            .iter()
            .skip(c)
            .step_by(self.channels)
            .copied()
            .collect();
        Image {
            width: self.width,
            height: self.height,
            channels: 1,
            data,
        }
    }

    /// Swaps the x and y axes.
    pub fn transpose(&self) -> Image<T> {
        let mut data = Vec::with_capacity(self.data.len());
        for x in 0..self.width {
            for y in 0..self.height {
                for c in 0..self.channels {
                    data.push(self.get(x, y, c));
                }
            }
        }
        Image {
            width: self.height,
            height: self.width,
            channels: self.channels,
            data,
        }
    }

    /// Copies out the `w`×`h` window whose top-left corner is `(x0, y0)`.
    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Image<T>> {
        if w == 0 || h == 0 || x0 + w > self.width || y0 + h > self.height {
            return Err(Error::TooSmall(format!(
                "crop {w}x{h}+{x0}+{y0} does not fit in {}x{}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(w * h * self.channels);
        for y in y0..y0 + h {
            let start = self.index(x0, y, 0);
            data.extend_from_slice(&self.data[start..start + w * self.channels]);
        }
        Ok(Image {
            width: w,
            height: h,
            channels: self.channels,
            data,
        })
    }

    pub(crate) fn check_same_dims<U>(&self, other: &Image<U>) -> Result<()> {
        if self.dims() != (other.width, other.height, other.channels) {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: (other.width, other.height, other.channels),
            });
        }
        Ok(())
    }
}

/// Linear HDR radiance map. Every sample is finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct IrradianceImage(Image<f64>);

impl IrradianceImage {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        Self::from_image(Image::new(width, height, channels, data)?)
    }

    pub fn from_image(image: Image<f64>) -> Result<Self> {
        if let Some(i) = image.data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            let px = i / image.channels;
            return Err(Error::InvalidSample {
                x: px % image.width,
                y: px / image.width,
                channel: i % image.channels,
                value: image.data[i],
            });
        }
        Ok(Self(image))
    }

    pub fn as_image(&self) -> &Image<f64> {
        &self.0
    }

    pub fn into_image(self) -> Image<f64> {
        self.0
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn height(&self) -> usize {
        self.0.height
    }

    pub fn channels(&self) -> usize {
        self.0.channels
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.0.dims()
    }

    pub fn data(&self) -> &[f64] {
        &self.0.data
    }

    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.0.get(x, y, c)
    }

    pub fn max_value(&self) -> f64 {
        self.0.data.iter().copied().fold(0.0, f64::max)
    }

    /// Multiplies every sample by `factor` (exposure scaling).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_image(self.0.map(|v| v * factor))
    }

    pub fn crop(&self, x0: usize, y0: usize, w: usize, h: usize) -> Result<Self> {
        Ok(Self(self.0.crop(x0, y0, w, h)?))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }
}

/// Per-sample winding numbers `W(x, y)`.
pub type WindingMap = Image<u32>;

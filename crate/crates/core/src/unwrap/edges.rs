use crate::codec::SensorImage;
use crate::error::{Error, Result};
use crate::image::WindingMap;

/// Signed wrap discontinuities on the pixel grid.
///
/// `horizontal` holds the boundary between `(x, y)` and `(x + 1, y)`,
/// `vertical` the one between `(x, y)` and `(x, y + 1)`. Entries are `0`
/// for an unmarked boundary or `±1`: the winding number changes by that
/// amount when stepping in the +x / +y direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrapEdgeMask {
    width: usize,
    height: usize,
    channels: usize,
    horizontal: Vec<i8>,
    vertical: Vec<i8>,
}

impl WrapEdgeMask {
    pub fn empty(width: usize, height: usize, channels: usize) -> Self {
        Self {
            width,
            height,
            channels,
            horizontal: vec![0; width.saturating_sub(1) * height * channels],
            vertical: vec![0; width * height.saturating_sub(1) * channels],
        }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.channels)
    }

    #[inline]
    fn h_index(&self, x: usize, y: usize, c: usize) -> usize {
        (y * (self.width - 1) + x) * self.channels + c
    }

    #[inline]
    fn v_index(&self, x: usize, y: usize, c: usize) -> usize {
        (y * self.width + x) * self.channels + c
    }

    /// Sign of the boundary `(x, y) → (x + 1, y)`.
    #[inline]
    pub fn horizontal(&self, x: usize, y: usize, c: usize) -> i8 {
        self.horizontal[self.h_index(x, y, c)]
    }

    /// Sign of the boundary `(x, y) → (x, y + 1)`.
    #[inline]
    pub fn vertical(&self, x: usize, y: usize, c: usize) -> i8 {
        self.vertical[self.v_index(x, y, c)]
    }

    pub fn set_horizontal(&mut self, x: usize, y: usize, c: usize, sign: i8) {
        let i = self.h_index(x, y, c);
        self.horizontal[i] = sign.signum();
    }

    pub fn set_vertical(&mut self, x: usize, y: usize, c: usize, sign: i8) {
        let i = self.v_index(x, y, c);
        self.vertical[i] = sign.signum();
    }

    pub fn marked_count(&self) -> usize {
        self.horizontal
            .iter()
            .chain(&self.vertical)
            .filter(|s| **s != 0)
            .count()
    }

    /// Ground-truth mask: a boundary is marked wherever the winding differs.
    pub fn from_winding(winding: &WindingMap) -> Self {
        let (w, h, c) = winding.dims();
        let mut mask = Self::empty(w, h, c);
        let sign = |a: u32, b: u32| (b as i64 - a as i64).signum() as i8;
        for y in 0..h {
            for x in 0..w {
                for ch in 0..c {
                    let here = winding.get(x, y, ch);
                    if x + 1 < w {
                        mask.set_horizontal(x, y, ch, sign(here, winding.get(x + 1, y, ch)));
                    }
                    if y + 1 < h {
                        mask.set_vertical(x, y, ch, sign(here, winding.get(x, y + 1, ch)));
                    }
                }
            }
        }
        mask
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::empty(self.height, self.width, self.channels);
        for y in 0..self.height {
            for x in 0..self.width {
                for c in 0..self.channels {
                    if x + 1 < self.width {
                        t.set_vertical(y, x, c, self.horizontal(x, y, c));
                    }
                    if y + 1 < self.height {
                        t.set_horizontal(y, x, c, self.vertical(x, y, c));
                    }
                }
            }
        }
        t
    }
}

/// Marks boundaries whose sensor jump exceeds `tau` in magnitude.
///
/// A large negative jump means the winding went up (the signal wrapped back
/// to the bottom of the range), so the sign is `-signum(d)`.
pub fn detect_wrap_edges(sensor: &SensorImage, tau: f64) -> Result<WrapEdgeMask> {
    let i_max = sensor.params().i_max;
    if !(tau > 0.0 && tau < i_max) {
        return Err(Error::InvalidParams(format!(
            "edge threshold must lie in (0, {i_max}), got {tau}"
        )));
    }
    let img = sensor.image();
    let (w, h, c) = img.dims();
    let mut mask = WrapEdgeMask::empty(w, h, c);
    let sign = |d: f64| {
        if d.abs() > tau {
            -(d.signum() as i8)
        } else {
            0
        }
    };
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                let here = img.get(x, y, ch);
                if x + 1 < w {
                    mask.set_horizontal(x, y, ch, sign(img.get(x + 1, y, ch) - here));
                }
                if y + 1 < h {
                    mask.set_vertical(x, y, ch, sign(img.get(x, y + 1, ch) - here));
                }
            }
        }
    }
    Ok(mask)
}

//! Image container, file I/O, convolution and warping primitives.
//!
//! Every raster in the crate is an [`ImageF`]: a single-channel, row-major
//! buffer of `f64` luminance values nominally in `[0, 1]`. Borders are handled
//! by replication throughout.

mod filter;
mod io;
mod warp;

pub use filter::{box_filter, convolve, Kernel2D};
pub use io::{decode_image, encode_image, load_image, save_image, SaveMode};
pub use warp::{warp, WarpKind, WarpSpec};

use crate::error::{Error, Result};

/// Single-channel floating point raster.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageF {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ImageF {
    /// Wraps a row-major buffer, checking dimensions and finiteness.
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be >= 1, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "buffer holds {} values, expected {}x{} = {}",
                data.len(),
                width,
                height,
                width * height
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!(
                "non-finite value at ({}, {})",
                i % width,
                i / width
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image of the given size filled with `value`.
    ///
    /// Panics if either dimension is zero or `value` is not finite.
    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be >= 1");
        assert!(value.is_finite(), "fill value must be finite");
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    ///
    /// Panics if either dimension is zero or `f` yields a non-finite value.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be >= 1");
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                assert!(v.is_finite(), "non-finite value at ({x}, {y})");
                data.push(v);
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Crate-internal constructor for buffers that are finite by construction.
    pub(crate) fn from_raw(width: usize, height: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self {
            width,
            height,
            data,
        }
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
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Sample with replicated borders.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width as isize - 1) as usize;
        let cy = y.clamp(0, self.height as isize - 1) as usize;
        self.data[cy * self.width + cx]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// Bilinear sample at a real-valued position; coordinates are clamped to the image.
    pub fn sample_bilinear_clamped(&self, x: f64, y: f64) -> f64 {
        let maxx = (self.width - 1) as f64;
        let maxy = (self.height - 1) as f64;
        bilinear(self, x.clamp(0.0, maxx), y.clamp(0.0, maxy))
    }

    /// Applies `f` to every pixel.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ImageF {
        let data: Vec<f64> = self.data.iter().map(|&v| f(v)).collect();
        assert!(data.iter().all(|v| v.is_finite()), "map produced non-finite value");
        ImageF::from_raw(self.width, self.height, data)
    }

    /// Pixel-wise combination of two equally sized images.
    pub fn zip_map(&self, other: &ImageF, f: impl Fn(f64, f64) -> f64) -> ImageF {
        assert_eq!(self.dims(), other.dims(), "image dimensions differ");
        let data: Vec<f64> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| f(a, b))
            .collect();
        assert!(data.iter().all(|v| v.is_finite()), "zip_map produced non-finite value");
        ImageF::from_raw(self.width, self.height, data)
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Exact 90° clockwise rotation (as displayed, y pointing down).
    ///
    /// Output pixel `(x', y')` takes input `(y', h - 1 - x')`.
    pub fn rot90(&self) -> ImageF {
        let (w, h) = self.dims();
        ImageF::from_fn(h, w, |x, y| self.get(y, h - 1 - x))
    }

    pub fn transpose(&self) -> ImageF {
        let (w, h) = self.dims();
        ImageF::from_fn(h, w, |x, y| self.get(y, x))
    }

    /// Copies the axis-aligned rectangle `[x0, x0+w) × [y0, y0+h)` (clipped to the image) out of `src`.
    pub fn paste_region(&mut self, src: &ImageF, region: Rect) {
        assert_eq!(self.dims(), src.dims(), "image dimensions differ");
        let Some((x0, y0, x1, y1)) = region.clip(self.width, self.height) else {
            return;
        };
        for y in y0..y1 {
            let start = y * self.width;
            self.data[start + x0..start + x1].copy_from_slice(&src.data[start + x0..start + x1]);
        }
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

/// Axis-aligned pixel rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    /// Clipped half-open bounds `(x0, y0, x1, y1)`, or `None` when empty after clipping.
    pub fn clip(&self, width: usize, height: usize) -> Option<(usize, usize, usize, usize)> {
        let x1 = self.x.saturating_add(self.w).min(width);
        let y1 = self.y.saturating_add(self.h).min(height);
        (self.x < x1 && self.y < y1).then_some((self.x, self.y, x1, y1))
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && y >= self.y && x - self.x < self.w && y - self.y < self.h
    }
}

/// Bilinear interpolation at an in-range position.
#[inline]
pub(crate) fn bilinear(img: &ImageF, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let xi = x0 as usize;
    let yi = y0 as usize;
    let xj = (xi + 1).min(img.width - 1);
    let yj = (yi + 1).min(img.height - 1);
    // lerp form keeps constant neighbourhoods exact
    let (a, b) = (img.get(xi, yi), img.get(xj, yi));
    let (c, d) = (img.get(xi, yj), img.get(xj, yj));
    let top = a + (b - a) * fx;
    let bottom = c + (d - c) * fx;
    top + (bottom - top) * fy
}

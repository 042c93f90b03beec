//! Hyperspectral and multispectral image cubes.
//!
//! Both cube types store pixels interleaved (`data[(y * width + x) * depth + k]`),
//! since every stage of the pipeline works on whole per-pixel vectors.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::spectral::SpectralGrid;

fn check_shape(height: usize, width: usize, depth: usize, len: usize) -> Result<()> {
    let expected = height
        .checked_mul(width)
        .and_then(|v| v.checked_mul(depth))
        .ok_or_else(|| invalid!("cube dimensions {height}x{width}x{depth} overflow"))?;
    if expected == 0 {
        return Err(invalid!("cube dimensions {height}x{width}x{depth} must be nonzero"));
    }
    if len != expected {
        return Err(invalid!(
            "cube data has {len} values, expected {height}x{width}x{depth} = {expected}"
        ));
    }
    Ok(())
}

/// `H×W×N` hyperspectral image on a spectral grid. Values are finite and
/// nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperCube {
    height: usize,
    width: usize,
    grid: SpectralGrid,
    data: Vec<f64>,
}

impl HyperCube {
    pub fn new(height: usize, width: usize, grid: SpectralGrid, data: Vec<f64>) -> Result<Self> {
        check_shape(height, width, grid.n_bands(), data.len())?;
        if let Some(i) = data.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(invalid!(
                "hyperspectral value {} at index {i} must be finite and >= 0",
                data[i]
            ));
        }
        Ok(Self {
            height,
            width,
            grid,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, grid: SpectralGrid) -> Result<Self> {
        Self::new(height, width, grid, vec![0.0; height * width * grid.n_bands()])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn n_bands(&self) -> usize {
        self.grid.n_bands()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn pixel(&self, y: usize, x: usize) -> &[f64] {
        let n = self.n_bands();
        let start = (y * self.width + x) * n;
        &self.data[start..start + n]
    }

    pub fn pixels(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.n_bands())
    }

    /// Band `k` as a row-major `H×W` plane.
    pub fn band(&self, k: usize) -> Vec<f64> {
        self.pixels().map(|p| p[k]).collect()
    }

    pub fn peak(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v))
    }

    /// The cube divided by its peak value; an all-zero cube is returned as is.
    pub fn normalized_to_peak(&self) -> Self {
        let peak = self.peak();
        if peak == 0.0 {
            return self.clone();
        }
        Self {
            data: self.data.iter().map(|v| v / peak).collect(),
            ..self.clone()
        }
    }
}

/// `H×W×M` multispectral image. Values are finite; they may be negative only
/// after additive Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiCube {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl MultiCube {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(height, width, channels, data.len())?;
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(invalid!("multispectral value at index {i} is not finite"));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Result<Self> {
        Self::new(height, width, channels, vec![0.0; height * width * channels])
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn n_channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, y: usize, x: usize) -> &[f64] {
        let start = (y * self.width + x) * self.channels;
        &self.data[start..start + self.channels]
    }

    #[inline]
    pub fn value(&self, y: usize, x: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    pub fn pixels(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.channels)
    }

    /// Channel `c` as a row-major `H×W` plane.
    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.pixels().map(|p| p[c]).collect()
    }

    pub fn peak(&self) -> f64 {
        self.data.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    /// Mirror-pads by `pad` pixels on every side (`dcb|abcd|cba`), reflecting
    /// repeatedly when `pad` exceeds the image size.
    pub fn mirror_padded(&self, pad: usize) -> Self {
        let (h, w, m) = (self.height, self.width, self.channels);
        let (ph, pw) = (h + 2 * pad, w + 2 * pad);
        let mut data = Vec::with_capacity(ph * pw * m);
        for py in 0..ph {
            let sy = reflect(py as isize - pad as isize, h);
            for px in 0..pw {
                let sx = reflect(px as isize - pad as isize, w);
                data.extend_from_slice(self.pixel(sy, sx));
            }
        }
        Self {
            height: ph,
            width: pw,
            channels: m,
            data,
        }
    }
}

/// Symmetric reflection of `i` into `0..n` with edge repetition.
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let r = i.rem_euclid(period);
    if r < n as isize {
        r as usize
    } else {
        (period - 1 - r) as usize
    }
}

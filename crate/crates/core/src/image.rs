//! Pixel grids: the grayscale image and the per-level label and
//! characteristic-intensity maps derived from it.

use crate::error::{Error, Result};

/// Row-major rectangular grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} values for a {width}x{height} grid",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
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
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: T) {
        self.data[y * self.width + x] = value;
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    /// Row-major indices of the 4-neighbors of `idx`, in the order up, left,
    /// right, down. Out-of-grid neighbors are skipped.
    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> {
        neighbors4(self.width, self.height, idx)
    }
}

/// 4-neighbors of a row-major index in up, left, right, down order.
pub(crate) fn neighbors4(width: usize, height: usize, idx: usize) -> impl Iterator<Item = usize> {
    let x = idx % width;
    let y = idx / width;
    let up = (y > 0).then(|| idx - width);
    let left = (x > 0).then(|| idx - 1);
    let right = (x + 1 < width).then(|| idx + 1);
    let down = (y + 1 < height).then(|| idx + width);
    [up, left, right, down].into_iter().flatten()
}

/// Per-pixel region identifiers. `0` marks a transient unlabeled pixel and
/// never survives into a finalized map.
pub type LabelMap = Grid<u32>;

/// Per-pixel characteristic intensity of the pixel's region.
pub type IntensityMap = Grid<f64>;

/// Grayscale image with real-valued intensities in `[0, 255]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage(Grid<f64>);

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if let Some(bad) = pixels.iter().find(|v| !(0.0..=255.0).contains(*v)) {
            return Err(Error::InvalidImage(format!(
                "pixel value {bad} outside [0, 255]"
            )));
        }
        Grid::from_vec(width, height, pixels).map(GrayImage)
    }

    pub fn constant(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Builds an image from a generator, clamping each value into `[0, 255]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let grid = Grid::from_fn(width, height, |x, y| f(x, y).clamp(0.0, 255.0));
        Self::new(width, height, grid.into_vec())
    }

    /// Wraps a grid whose values are already known to be in range.
    pub(crate) fn from_grid_unchecked(grid: Grid<f64>) -> Self {
        debug_assert!(grid.as_slice().iter().all(|v| (0.0..=255.0).contains(v)));
        GrayImage(grid)
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    pub fn height(&self) -> usize {
        self.0.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.0.get(x, y)
    }

    pub fn pixels(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn mean(&self) -> f64 {
        self.pixels().iter().sum::<f64>() / self.pixels().len() as f64
    }
}

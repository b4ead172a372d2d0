//! Bottom-up squeezing (2×2 block averaging) and top-down map expansion
//! (parent-to-four-children replication).

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::image::{GrayImage, Grid};

/// Levels ordered from the original image (index 0) to the coarsest.
#[derive(Clone, Debug, PartialEq)]
pub struct Pyramid {
    levels: Vec<GrayImage>,
}

impl Pyramid {
    pub fn levels(&self) -> &[GrayImage] {
        &self.levels
    }

    pub fn level(&self, index: usize) -> &GrayImage {
        &self.levels[index]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Index of the coarsest level.
    pub fn top_index(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn top(&self) -> &GrayImage {
        self.levels.last().expect("pyramid has at least one level")
    }
}

#[inline]
fn half_up(n: usize) -> usize {
    n.div_ceil(2)
}

/// Halves both dimensions (rounding up), averaging each 2×2 block. Odd
/// dimensions are first padded by replicating the last column/row.
pub fn shrink_once(image: &GrayImage) -> GrayImage {
    shrink_once_with(image, Execution::default())
}

pub fn shrink_once_with(image: &GrayImage, exec: Execution) -> GrayImage {
    let (w, h) = image.dims();
    let (nw, nh) = (half_up(w), half_up(h));
    let src = image.pixels();
    let data = exec.map(nw * nh, |i| {
        let (ox, oy) = (i % nw, i / nw);
        let x0 = 2 * ox;
        let y0 = 2 * oy;
        let x1 = (x0 + 1).min(w - 1);
        let y1 = (y0 + 1).min(h - 1);
        let a = src[y0 * w + x0];
        let b = src[y0 * w + x1];
        let c = src[y1 * w + x0];
        let d = src[y1 * w + x1];
        (a + b + c + d) / 4.0
    });
    GrayImage::from_grid_unchecked(Grid::from_vec(nw, nh, data).expect("dims"))
}

/// Default stop dimension: stop shrinking once min(width, height) ≤ 16.
pub const DEFAULT_MIN_TOP_DIM: usize = 16;

/// Shrinks repeatedly while the current top's smaller dimension exceeds
/// `min_top_dim`. The returned pyramid always contains the original.
pub fn build_pyramid(image: &GrayImage, min_top_dim: usize) -> Pyramid {
    build_pyramid_with(image, min_top_dim, Execution::default())
}

pub fn build_pyramid_with(image: &GrayImage, min_top_dim: usize, exec: Execution) -> Pyramid {
    let mut levels = vec![image.clone()];
    loop {
        let top = levels.last().unwrap();
        if top.width().min(top.height()) <= min_top_dim {
            break;
        }
        let next = shrink_once_with(top, exec);
        levels.push(next);
    }
    Pyramid { levels }
}

/// Replicates each parent value onto its children at `target` dims:
/// `out(x, y) = map(x / 2, y / 2)`.
pub fn expand_once<T: Copy>(map: &Grid<T>, target: (usize, usize)) -> Result<Grid<T>> {
    let (tw, th) = target;
    if half_up(tw) != map.width() || half_up(th) != map.height() || tw == 0 || th == 0 {
        return Err(Error::DimensionMismatch {
            expected: (2 * map.width(), 2 * map.height()),
            actual: target,
        });
    }
    Ok(Grid::from_fn(tw, th, |x, y| map.get(x / 2, y / 2)))
}

/// Expands a map through several levels down to `dims_chain`'s last entry.
/// `dims_chain` lists successive target dimensions, coarse to fine.
pub fn expand_through<T: Copy>(map: &Grid<T>, dims_chain: &[(usize, usize)]) -> Result<Grid<T>> {
    let mut cur = map.clone();
    for &dims in dims_chain {
        cur = expand_once(&cur, dims)?;
    }
    Ok(cur)
}

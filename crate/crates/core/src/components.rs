//! 4-connected component labeling over row-major grids.

use std::collections::VecDeque;

use crate::image::neighbors4;

/// Pixels of one component, in BFS order starting from its smallest
/// row-major index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub pixels: Vec<usize>,
}

impl Component {
    /// Smallest row-major index, i.e. the pixel that discovered it.
    pub fn first(&self) -> usize {
        self.pixels[0]
    }

    pub fn area(&self) -> usize {
        self.pixels.len()
    }
}

/// Splits a grid into 4-connected components of equal keys. Pixels whose key
/// is `None` belong to no component. Components come out in raster order of
/// their first pixel.
pub fn connected_components<K, F>(width: usize, height: usize, key: F) -> Vec<Component>
where
    K: PartialEq,
    F: Fn(usize) -> Option<K>,
{
    let n = width * height;
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let Some(k) = key(start) else { continue };
        seen[start] = true;
        queue.push_back(start);
        let mut pixels = Vec::new();
        while let Some(p) = queue.pop_front() {
            pixels.push(p);
            for q in neighbors4(width, height, p) {
                if !seen[q] && key(q).as_ref() == Some(&k) {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        out.push(Component { pixels });
    }
    out
}

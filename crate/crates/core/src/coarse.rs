//! Segmentation of the coarsest pyramid level: gradient-threshold borders,
//! similarity-bounded region growing, then nearest-intensity assimilation of
//! whatever is left unlabeled.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::config::SegConfig;
use crate::exec::Execution;
use crate::image::{neighbors4, GrayImage, Grid, IntensityMap, LabelMap};

/// Label map, characteristic-intensity map and the label registry that ties
/// them together.
#[derive(Clone, Debug, PartialEq)]
pub struct Segmentation {
    pub labels: LabelMap,
    pub intensities: IntensityMap,
    pub char_intensity: BTreeMap<u32, f64>,
    /// Next unused label.
    pub next_label: u32,
    /// Labels whose lineage began below the top level.
    pub emergent: BTreeSet<u32>,
}

impl Segmentation {
    /// Builds a segmentation whose characteristic intensities are the means
    /// of `reference` over each label. Registry entries and emergent marks for
    /// labels no longer present are dropped.
    pub fn from_labels(
        reference: &GrayImage,
        labels: LabelMap,
        next_label: u32,
        emergent: BTreeSet<u32>,
    ) -> Self {
        let (char_intensity, intensities) = compute_characteristic_intensities(reference, &labels);
        let emergent = emergent
            .into_iter()
            .filter(|l| char_intensity.contains_key(l))
            .collect();
        Self {
            labels,
            intensities,
            char_intensity,
            next_label,
            emergent,
        }
    }

    /// Builds a segmentation from given characteristic intensities.
    ///
    /// Panics if a label in the map has no intensity.
    pub fn from_parts(
        labels: LabelMap,
        char_intensity: BTreeMap<u32, f64>,
        next_label: u32,
        emergent: BTreeSet<u32>,
    ) -> Self {
        let intensities = materialize(&labels, &char_intensity);
        Self {
            labels,
            intensities,
            char_intensity,
            next_label,
            emergent,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.labels.dims()
    }

    pub fn region_count(&self) -> usize {
        self.char_intensity.len()
    }

    /// Pixel count per label.
    pub fn areas(&self) -> BTreeMap<u32, usize> {
        let mut areas = BTreeMap::new();
        for &l in self.labels.as_slice() {
            *areas.entry(l).or_insert(0) += 1;
        }
        areas
    }

    #[inline]
    pub(crate) fn ci(&self, label: u32) -> f64 {
        self.char_intensity[&label]
    }
}

/// Dense label-indexed copy of a registry; `NaN` marks absent labels.
fn dense_table(char_intensity: &BTreeMap<u32, f64>) -> Vec<f64> {
    let max = char_intensity.keys().next_back().copied().unwrap_or(0) as usize;
    let mut table = vec![f64::NAN; max + 1];
    for (&l, &v) in char_intensity {
        table[l as usize] = v;
    }
    table
}

fn materialize(labels: &LabelMap, char_intensity: &BTreeMap<u32, f64>) -> IntensityMap {
    let table = dense_table(char_intensity);
    let values = labels
        .as_slice()
        .iter()
        .map(|&l| {
            let v = table.get(l as usize).copied().unwrap_or(f64::NAN);
            assert!(!v.is_nan(), "label {l} has no characteristic intensity");
            v
        })
        .collect();
    Grid::from_vec(labels.width(), labels.height(), values).expect("dims")
}

/// Picks the candidate label whose characteristic intensity is nearest to
/// `value`; ties go to the smaller label.
pub(crate) fn nearest_label(
    value: f64,
    candidates: impl IntoIterator<Item = u32>,
    ci: impl Fn(u32) -> f64,
) -> Option<(u32, f64)> {
    let mut best: Option<(u32, f64)> = None;
    for c in candidates {
        let d = (value - ci(c)).abs();
        best = match best {
            Some((bl, bd)) if bd < d || (bd == d && bl <= c) => Some((bl, bd)),
            _ => Some((c, d)),
        };
    }
    best
}

/// Marks pixels whose largest absolute difference to a 4-neighbor exceeds
/// `border_threshold`.
pub fn outline_borders(image: &GrayImage, cfg: &SegConfig) -> Grid<bool> {
    outline_borders_with(image, cfg, Execution::default())
}

pub fn outline_borders_with(image: &GrayImage, cfg: &SegConfig, exec: Execution) -> Grid<bool> {
    let (w, h) = image.dims();
    let px = image.pixels();
    let threshold = cfg.border_threshold;
    let data = exec.map(w * h, |i| {
        neighbors4(w, h, i).any(|q| (px[i] - px[q]).abs() > threshold)
    });
    Grid::from_vec(w, h, data).expect("dims")
}

/// Raster-order seeded growth over non-border pixels.
///
/// A neighbor joins a region when it is unlabeled, not a border pixel, and
/// within `delta` of the region's running mean. Regions smaller than
/// `min_region_size` are dissolved to 0 and survivors are renumbered
/// `1, 2, …` in seeding order. Border pixels stay 0.
pub fn grow_regions(image: &GrayImage, borders: &Grid<bool>, cfg: &SegConfig) -> LabelMap {
    let (w, h) = image.dims();
    assert_eq!(borders.dims(), (w, h), "border grid must match image dims");
    let px = image.pixels();
    let border = borders.as_slice();
    let mut labels = vec![0u32; w * h];
    let mut regions: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::new();

    for start in 0..w * h {
        if border[start] || labels[start] != 0 {
            continue;
        }
        let label = regions.len() as u32 + 1;
        labels[start] = label;
        let mut sum = px[start];
        let mut members = vec![start];
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            for q in neighbors4(w, h, p) {
                if border[q] || labels[q] != 0 {
                    continue;
                }
                let mean = sum / members.len() as f64;
                if (px[q] - mean).abs() <= cfg.delta {
                    labels[q] = label;
                    sum += px[q];
                    members.push(q);
                    queue.push_back(q);
                }
            }
        }
        regions.push(members);
    }

    let mut next = 0u32;
    for members in &regions {
        let new = if members.len() >= cfg.min_region_size {
            next += 1;
            next
        } else {
            0
        };
        for &p in members {
            labels[p] = new;
        }
    }
    Grid::from_vec(w, h, labels).expect("dims")
}

/// Absorbs 0-pixels into adjacent regions by nearest characteristic
/// intensity, sweeping until none remain. Each sweep decides from its start
/// state and applies all decisions together; `char_intensity` stays fixed.
///
/// An all-zero map becomes a single region labeled 1.
pub fn assimilate_unlabeled(
    image: &GrayImage,
    labels: &LabelMap,
    char_intensity: &BTreeMap<u32, f64>,
) -> LabelMap {
    let (w, h) = labels.dims();
    let mut out = labels.clone();
    if out.as_slice().iter().all(|&l| l == 0) {
        out.as_mut_slice().fill(1);
        return out;
    }
    let px = image.pixels();
    let mut pending: Vec<usize> = (0..w * h).filter(|&i| out.as_slice()[i] == 0).collect();
    while !pending.is_empty() {
        let cur = out.as_slice();
        let decisions: Vec<(usize, Option<u32>)> = pending
            .iter()
            .map(|&p| {
                let cands = neighbors4(w, h, p).map(|q| cur[q]).filter(|&l| l != 0);
                (
                    p,
                    nearest_label(px[p], cands, |l| char_intensity[&l]).map(|(l, _)| l),
                )
            })
            .collect();
        let before = pending.len();
        pending.clear();
        for (p, d) in decisions {
            match d {
                Some(l) => out.as_mut_slice()[p] = l,
                None => pending.push(p),
            }
        }
        if pending.len() == before {
            break;
        }
    }
    out
}

/// Mean of `image` over each nonzero label, plus the per-pixel map of those
/// means (0-labeled pixels map to 0.0).
pub fn compute_characteristic_intensities(
    image: &GrayImage,
    labels: &LabelMap,
) -> (BTreeMap<u32, f64>, IntensityMap) {
    let max = labels.as_slice().iter().copied().max().unwrap_or(0) as usize;
    let mut sums = vec![0.0f64; max + 1];
    let mut counts = vec![0usize; max + 1];
    for (&l, &v) in labels.as_slice().iter().zip(image.pixels()) {
        sums[l as usize] += v;
        counts[l as usize] += 1;
    }
    let means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &n)| if n > 0 { s / n as f64 } else { 0.0 })
        .collect();
    let ci: BTreeMap<u32, f64> = (1..=max)
        .filter(|&l| counts[l] > 0)
        .map(|l| (l as u32, means[l]))
        .collect();
    let values = labels
        .as_slice()
        .iter()
        .map(|&l| if l == 0 { 0.0 } else { means[l as usize] })
        .collect();
    (
        ci,
        Grid::from_vec(labels.width(), labels.height(), values).expect("dims"),
    )
}

/// Full coarse-level segmentation of the pyramid top.
pub fn segment_coarse(image: &GrayImage, cfg: &SegConfig) -> Segmentation {
    segment_coarse_with(image, cfg, Execution::default()).0
}

/// Returns the segmentation and the number of pixel evaluations it took.
pub fn segment_coarse_with(
    image: &GrayImage,
    cfg: &SegConfig,
    exec: Execution,
) -> (Segmentation, usize) {
    let borders = outline_borders_with(image, cfg, exec);
    let grown = grow_regions(image, &borders, cfg);
    let unlabeled = grown.as_slice().iter().filter(|&&l| l == 0).count();
    let (partial_ci, _) = compute_characteristic_intensities(image, &grown);
    let labels = assimilate_unlabeled(image, &grown, &partial_ci);
    let next_label = labels.as_slice().iter().copied().max().unwrap_or(0) + 1;
    let seg = Segmentation::from_labels(image, labels, next_label, BTreeSet::new());
    (seg, 2 * image.pixels().len() + unlabeled)
}

//! Test-only synthetic images and independent oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdseg::components::connected_components;
use tdseg::{GrayImage, Grid, LabelMap, SegConfig, Segmentation, SegmentationResult};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn two_tone(w: usize, h: usize) -> GrayImage {
    GrayImage::from_fn(w, h, |x, _| if x < w / 2 { 50.0 } else { 200.0 }).unwrap()
}

/// Top-left corners of the bright squares in [`multi_scale`]. All are
/// multiples of 8 and no two share a 32×32 block.
pub const SQUARES: [(usize, usize); 8] = [
    (40, 72),
    (136, 200),
    (72, 392),
    (168, 552),
    (328, 104),
    (424, 232),
    (360, 424),
    (456, 584),
];

pub fn in_square(x: usize, y: usize) -> Option<usize> {
    SQUARES
        .iter()
        .position(|&(sx, sy)| (sx..sx + 8).contains(&x) && (sy..sy + 8).contains(&y))
}

/// 512×640: left half 40, right half 90, plus eight 8×8 squares at +150.
pub fn multi_scale() -> GrayImage {
    GrayImage::from_fn(512, 640, |x, y| {
        let bg = if x < 256 { 40.0 } else { 90.0 };
        if in_square(x, y).is_some() {
            bg + 150.0
        } else {
            bg
        }
    })
    .unwrap()
}

/// Smooth textured image with a few shapes.
pub fn textured(w: usize, h: usize) -> GrayImage {
    GrayImage::from_fn(w, h, |x, y| {
        let (fx, fy) = (x as f64 / w as f64, y as f64 / h as f64);
        let mut v = 60.0 + 80.0 * fx + 40.0 * (fy * 6.0).sin();
        if ((fx - 0.3).powi(2) + (fy - 0.4).powi(2)).sqrt() < 0.15 {
            v = 230.0;
        }
        if (0.6..0.8).contains(&fx) && (0.6..0.9).contains(&fy) {
            v = 15.0;
        }
        v
    })
    .unwrap()
}

/// Pads to even dimensions by replicating the last column/row.
pub fn pad_even(img: &GrayImage) -> Vec<Vec<f64>> {
    let (w, h) = img.dims();
    let (pw, ph) = (w + w % 2, h + h % 2);
    (0..ph)
        .map(|y| {
            (0..pw)
                .map(|x| img.get(x.min(w - 1), y.min(h - 1)))
                .collect()
        })
        .collect()
}

pub fn random_image(rng: &mut ChaCha8Rng, max: usize) -> GrayImage {
    let (w, h) = (rng.gen_range(1..=max), rng.gen_range(1..=max));
    GrayImage::from_fn(w, h, |_, _| f64::from(rng.gen_range(0u8..=255))).unwrap()
}

/// A small refinement instance: a reference image and the segmentation
/// inherited from a random parent level.
pub struct Instance {
    pub reference: GrayImage,
    pub inherited: Segmentation,
}

pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let (w, h): (usize, usize) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
    let (pw, ph) = (w.div_ceil(2), h.div_ceil(2));
    let k = rng.gen_range(1..=4u32);
    let tones: Vec<f64> = (0..=k).map(|_| rng.gen_range(0.0..255.0)).collect();
    let parent_labels = Grid::from_fn(pw, ph, |_, _| rng.gen_range(1..=k));
    let present: BTreeSet<u32> = parent_labels.as_slice().iter().copied().collect();
    let parent_ci: BTreeMap<u32, f64> = present
        .iter()
        .map(|&l| {
            (
                l,
                (tones[l as usize] + rng.gen_range(-10.0..10.0)).clamp(0.0, 255.0),
            )
        })
        .collect();
    let parent = Segmentation::from_parts(parent_labels.clone(), parent_ci, k + 1, BTreeSet::new());
    let reference = GrayImage::from_fn(w, h, |x, y| {
        let truth = if rng.gen_bool(0.2) {
            rng.gen_range(1..=k)
        } else {
            parent_labels.get(x / 2, y / 2)
        };
        tones[truth as usize] + rng.gen_range(-8.0..8.0)
    })
    .unwrap();
    let inherited = tdseg::descent::inherit(&parent, (w, h));
    Instance {
        reference,
        inherited,
    }
}

/// Brute-force single refinement pass straight from the rule: every pixel's
/// best candidate is computed from the pass-start state.
pub struct OraclePass {
    pub labels: Vec<u32>,
    pub char_intensity: BTreeMap<u32, f64>,
    pub changed: usize,
    pub orphans: Vec<(usize, usize)>,
    pub deviants: usize,
}

pub fn oracle_refine_pass(reference: &GrayImage, seg: &Segmentation, delta: f64) -> OraclePass {
    let (w, h) = reference.dims();
    let start = seg.labels.as_slice();
    let mut labels = start.to_vec();
    let mut orphans = Vec::new();
    let (mut changed, mut deviants) = (0, 0);
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            let v = reference.get(x, y);
            let own = start[p];
            if (v - seg.char_intensity[&own]).abs() <= delta {
                continue;
            }
            deviants += 1;
            let mut cands = vec![own];
            if y > 0 {
                cands.push(start[p - w]);
            }
            if x > 0 {
                cands.push(start[p - 1]);
            }
            if x + 1 < w {
                cands.push(start[p + 1]);
            }
            if y + 1 < h {
                cands.push(start[p + w]);
            }
            cands.sort_unstable();
            cands.dedup();
            // ascending labels, strict < keeps the smallest on ties
            let mut best = cands[0];
            let mut best_d = (v - seg.char_intensity[&best]).abs();
            for &c in &cands[1..] {
                let d = (v - seg.char_intensity[&c]).abs();
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            if best_d <= delta {
                if best != own {
                    labels[p] = best;
                    changed += 1;
                }
            } else {
                orphans.push((x, y));
            }
        }
    }
    let char_intensity = if deviants == 0 {
        seg.char_intensity.clone()
    } else {
        let mut acc: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
        for (p, &l) in labels.iter().enumerate() {
            let e = acc.entry(l).or_insert((0.0, 0));
            e.0 += reference.pixels()[p];
            e.1 += 1;
        }
        acc.into_iter()
            .map(|(l, (s, n))| (l, s / n as f64))
            .collect()
    };
    OraclePass {
        labels,
        char_intensity,
        changed,
        orphans,
        deviants,
    }
}

/// Registry integrity: areas cover the level, adjacency is symmetric,
/// centroids sit inside bboxes, lineage points at existing parents.
pub fn check_registry(result: &SegmentationResult) -> Result<(), String> {
    let levels = &result.objects.levels;
    if levels.len() != result.pyramid.len() {
        return Err("object list level count differs from pyramid".into());
    }
    for (i, lvl) in levels.iter().enumerate() {
        let area: usize = lvl.regions.iter().map(|r| r.area).sum();
        if area != lvl.width * lvl.height {
            return Err(format!("level {}: areas sum to {area}", lvl.level));
        }
        let seg = &result.level(lvl.level).segmentation;
        let distinct: BTreeSet<u32> = seg.labels.as_slice().iter().copied().collect();
        let ids: BTreeSet<u32> = lvl.regions.iter().map(|r| r.id).collect();
        if distinct != ids || ids.len() != lvl.regions.len() {
            return Err(format!("level {}: records do not match labels", lvl.level));
        }
        let by_id: BTreeMap<u32, _> = lvl.regions.iter().map(|r| (r.id, r)).collect();
        for r in &lvl.regions {
            let [x0, y0, x1, y1] = r.bbox;
            let [cx, cy] = r.centroid;
            if !(x0 as f64 <= cx && cx <= x1 as f64 && y0 as f64 <= cy && cy <= y1 as f64) {
                return Err(format!(
                    "level {} region {}: centroid outside bbox",
                    lvl.level, r.id
                ));
            }
            if x1 >= lvl.width || y1 >= lvl.height {
                return Err(format!(
                    "level {} region {}: bbox out of bounds",
                    lvl.level, r.id
                ));
            }
            for a in &r.adjacent {
                if !by_id.get(a).is_some_and(|o| o.adjacent.contains(&r.id)) {
                    return Err(format!(
                        "level {}: adjacency {}-{a} not symmetric",
                        lvl.level, r.id
                    ));
                }
            }
            let is_top = i == 0;
            if r.parent.is_none() != (is_top || r.emergent) {
                return Err(format!(
                    "level {} region {}: parent/emergent mismatch",
                    lvl.level, r.id
                ));
            }
            if let Some(p) = r.parent {
                if !levels[i - 1].regions.iter().any(|q| q.id == p) {
                    return Err(format!(
                        "level {} region {}: parent {p} missing",
                        lvl.level, r.id
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Number of 4-connected components per label.
pub fn components_per_label(labels: &LabelMap) -> BTreeMap<u32, usize> {
    let mut out = BTreeMap::new();
    let comps = connected_components(labels.width(), labels.height(), |i| {
        Some(labels.as_slice()[i])
    });
    for c in comps {
        *out.entry(labels.as_slice()[c.first()]).or_insert(0) += 1;
    }
    out
}

pub fn default_cfg() -> SegConfig {
    SegConfig::default()
}

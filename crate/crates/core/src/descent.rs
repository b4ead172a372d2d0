//! Top-down refinement: expand the maps of the level above, find pixels that
//! disagree with the current-level image, let them move to a better-matching
//! neighboring region, and seed new regions where nothing fits.
//!
//! Every pass is a function of its start state (Jacobi semantics): all
//! per-pixel decisions read the pass-start maps, and updates are applied
//! together at the end. This is what makes the parallel path exact.

use std::collections::{BTreeMap, BTreeSet};

use crate::coarse::{nearest_label, Segmentation};
use crate::components::connected_components;
use crate::config::SegConfig;
use crate::exec::Execution;
use crate::image::{neighbors4, GrayImage};
use crate::pyramid::{expand_once, Pyramid};

/// Outcome of refining one pyramid level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelState {
    pub level: usize,
    pub segmentation: Segmentation,
    /// Deviant-pixel count at the start of each refinement pass.
    pub deviant_count_history: Vec<usize>,
    /// Whether each pass produced orphans (and therefore a seeding step).
    pub seeded_history: Vec<bool>,
    /// Per-pixel evaluations spent on this level.
    pub pixel_visits: usize,
}

impl LevelState {
    pub fn passes(&self) -> usize {
        self.deviant_count_history.len()
    }
}

/// Per-pixel verdict of a refinement pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Decision {
    /// Not deviant, or deviant but its own label is still the best candidate.
    Keep {
        deviant: bool,
    },
    Move(u32),
    Orphan,
}

pub(crate) fn decide(
    reference: &GrayImage,
    seg: &Segmentation,
    cfg: &SegConfig,
    p: usize,
) -> Decision {
    let (w, h) = seg.dims();
    let labels = seg.labels.as_slice();
    let value = reference.pixels()[p];
    let own = labels[p];
    if (value - seg.intensities.as_slice()[p]).abs() <= cfg.delta {
        return Decision::Keep { deviant: false };
    }
    let candidates = std::iter::once(own).chain(neighbors4(w, h, p).map(|q| labels[q]));
    match nearest_label(value, candidates, |l| seg.ci(l)) {
        Some((l, d)) if d <= cfg.delta => {
            if l == own {
                Decision::Keep { deviant: true }
            } else {
                Decision::Move(l)
            }
        }
        _ => Decision::Orphan,
    }
}

fn to_xy(width: usize, p: usize) -> (usize, usize) {
    (p % width, p / width)
}

/// Pixels whose reference value differs from their region's characteristic
/// intensity by more than `delta`, as `(x, y)` in raster order.
pub fn detect_deviants(
    reference: &GrayImage,
    seg: &Segmentation,
    cfg: &SegConfig,
) -> Vec<(usize, usize)> {
    detect_deviants_with(reference, seg, cfg, Execution::default())
}

pub fn detect_deviants_with(
    reference: &GrayImage,
    seg: &Segmentation,
    cfg: &SegConfig,
    exec: Execution,
) -> Vec<(usize, usize)> {
    assert_eq!(
        reference.dims(),
        seg.dims(),
        "reference/segmentation dims differ"
    );
    let px = reference.pixels();
    let mask = exec.map(px.len(), |p| {
        (px[p] - seg.intensities.as_slice()[p]).abs() > cfg.delta
    });
    let w = reference.width();
    mask.iter()
        .enumerate()
        .filter(|(_, &d)| d)
        .map(|(p, _)| to_xy(w, p))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct PassOutcome {
    pub segmentation: Segmentation,
    /// Pixels whose label changed.
    pub changed: usize,
    /// Deviant pixels with no candidate within `delta`, `(x, y)` raster order.
    pub orphans: Vec<(usize, usize)>,
    /// Deviant pixels found at pass start.
    pub deviants: usize,
}

/// One refinement pass.
///
/// Each deviant pixel considers its own label and its 4-neighbors' labels
/// and takes the one with the nearest characteristic intensity (ties to the
/// smaller label), provided that distance is within `delta`; otherwise it is
/// an orphan and keeps its label. Characteristic intensities are recomputed
/// from `reference` afterwards. With no deviants the input is returned as is.
pub fn refine_pass(reference: &GrayImage, seg: &Segmentation, cfg: &SegConfig) -> PassOutcome {
    refine_pass_with(reference, seg, cfg, Execution::default())
}

pub fn refine_pass_with(
    reference: &GrayImage,
    seg: &Segmentation,
    cfg: &SegConfig,
    exec: Execution,
) -> PassOutcome {
    assert_eq!(
        reference.dims(),
        seg.dims(),
        "reference/segmentation dims differ"
    );
    let n = reference.pixels().len();
    let decisions = exec.map(n, |p| decide(reference, seg, cfg, p));
    apply_decisions(reference, seg, &decisions)
}

pub(crate) fn apply_decisions(
    reference: &GrayImage,
    seg: &Segmentation,
    decisions: &[Decision],
) -> PassOutcome {
    let w = reference.width();
    let mut labels = seg.labels.clone();
    let mut changed = 0;
    let mut deviants = 0;
    let mut orphans = Vec::new();
    for (p, d) in decisions.iter().enumerate() {
        match *d {
            Decision::Keep { deviant } => deviants += deviant as usize,
            Decision::Move(l) => {
                deviants += 1;
                changed += 1;
                labels.as_mut_slice()[p] = l;
            }
            Decision::Orphan => {
                deviants += 1;
                orphans.push(to_xy(w, p));
            }
        }
    }
    let segmentation = if deviants == 0 {
        seg.clone()
    } else {
        Segmentation::from_labels(reference, labels, seg.next_label, seg.emergent.clone())
    };
    PassOutcome {
        segmentation,
        changed,
        orphans,
        deviants,
    }
}

/// What a seeding step did.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SeedReport {
    /// Fresh labels created, in allocation order.
    pub new_regions: Vec<u32>,
    /// Pixels whose label changed.
    pub relabeled: usize,
}

/// Turns orphan clusters into new regions.
///
/// Orphans are grouped into 4-connected components. Components of at least
/// `min_seed_size` pixels become fresh, emergent regions. Smaller ones are
/// absorbed sweep by sweep into the adjacent label with the nearest
/// characteristic intensity, regardless of `delta`.
pub fn seed_new_regions(
    reference: &GrayImage,
    seg: &Segmentation,
    orphans: &[(usize, usize)],
    cfg: &SegConfig,
) -> (Segmentation, SeedReport) {
    if orphans.is_empty() {
        return (seg.clone(), SeedReport::default());
    }
    let (w, h) = seg.dims();
    let px = reference.pixels();
    let mut mask = vec![false; w * h];
    for &(x, y) in orphans {
        mask[y * w + x] = true;
    }
    let mut labels = seg.labels.clone();
    let mut ci = seg.char_intensity.clone();
    let mut emergent = seg.emergent.clone();
    let mut next = seg.next_label;
    let mut report = SeedReport::default();
    let mut pending = vec![false; w * h];

    for comp in connected_components(w, h, |i| mask[i].then_some(())) {
        if comp.area() >= cfg.min_seed_size {
            let label = next;
            next += 1;
            let mean = comp.pixels.iter().map(|&p| px[p]).sum::<f64>() / comp.area() as f64;
            for &p in &comp.pixels {
                labels.as_mut_slice()[p] = label;
            }
            ci.insert(label, mean);
            emergent.insert(label);
            report.new_regions.push(label);
        } else {
            for &p in &comp.pixels {
                pending[p] = true;
            }
        }
    }

    let mut queue: Vec<usize> = (0..w * h).filter(|&p| pending[p]).collect();
    while !queue.is_empty() {
        let cur = labels.as_slice();
        let decisions: Vec<Option<u32>> = queue
            .iter()
            .map(|&p| {
                let cands = neighbors4(w, h, p).filter(|&q| !pending[q]).map(|q| cur[q]);
                nearest_label(px[p], cands, |l| ci[&l]).map(|(l, _)| l)
            })
            .collect();
        let before = queue.len();
        let mut rest = Vec::new();
        for (&p, d) in queue.iter().zip(decisions) {
            match d {
                Some(l) => {
                    labels.as_mut_slice()[p] = l;
                    pending[p] = false;
                }
                None => rest.push(p),
            }
        }
        queue = rest;
        if queue.len() == before {
            // component covers the whole grid; nothing to absorb into
            break;
        }
    }

    report.relabeled = labels
        .as_slice()
        .iter()
        .zip(seg.labels.as_slice())
        .filter(|(a, b)| a != b)
        .count();
    if report.relabeled == 0 {
        // only forced absorption back into the same labels
        return (seg.clone(), report);
    }
    (
        Segmentation::from_labels(reference, labels, next, emergent),
        report,
    )
}

/// Splits every label into its 4-connected components. The largest
/// component keeps the label (ties to the one reached first in raster
/// order); the others get fresh labels, which inherit emergent status.
pub fn enforce_connectivity(reference: &GrayImage, seg: &Segmentation) -> Segmentation {
    let (w, h) = seg.dims();
    let src = seg.labels.as_slice();
    let comps = connected_components(w, h, |i| Some(src[i]));

    let mut keeper: BTreeMap<u32, usize> = BTreeMap::new();
    for (ci, comp) in comps.iter().enumerate() {
        let label = src[comp.first()];
        match keeper.get(&label) {
            Some(&k) if comps[k].area() >= comp.area() => {}
            _ => {
                keeper.insert(label, ci);
            }
        }
    }

    let mut labels = seg.labels.clone();
    let mut next = seg.next_label;
    let mut emergent: BTreeSet<u32> = seg.emergent.clone();
    for (ci, comp) in comps.iter().enumerate() {
        let label = src[comp.first()];
        if keeper[&label] == ci {
            continue;
        }
        let fresh = next;
        next += 1;
        if seg.emergent.contains(&label) {
            emergent.insert(fresh);
        }
        for &p in &comp.pixels {
            labels.as_mut_slice()[p] = fresh;
        }
    }
    Segmentation::from_labels(reference, labels, next, emergent)
}

/// Refines an inherited segmentation against this level's image until a
/// pass changes nothing and seeds nothing, or `max_refine_iters` passes ran.
pub fn refine_level(
    reference: &GrayImage,
    inherited: Segmentation,
    level: usize,
    cfg: &SegConfig,
) -> LevelState {
    refine_level_with(reference, inherited, level, cfg, Execution::default())
}

pub fn refine_level_with(
    reference: &GrayImage,
    inherited: Segmentation,
    level: usize,
    cfg: &SegConfig,
    exec: Execution,
) -> LevelState {
    let n = reference.pixels().len();
    let mut seg = inherited;
    let mut history = Vec::new();
    let mut seeded = Vec::new();
    let mut visits = 0;
    for _ in 0..cfg.max_refine_iters {
        let pass = refine_pass_with(reference, &seg, cfg, exec);
        visits += n + pass.deviants;
        history.push(pass.deviants);
        seeded.push(!pass.orphans.is_empty());
        let (next, report) = seed_new_regions(reference, &pass.segmentation, &pass.orphans, cfg);
        visits += pass.orphans.len();
        seg = next;
        if pass.changed + report.relabeled == 0 && report.new_regions.is_empty() {
            break;
        }
    }
    let segmentation = enforce_connectivity(reference, &seg);
    LevelState {
        level,
        segmentation,
        deviant_count_history: history,
        seeded_history: seeded,
        pixel_visits: visits,
    }
}

/// Expands the maps of `parent` onto the next finer level, carrying the
/// characteristic intensities unchanged.
pub fn inherit(parent: &Segmentation, dims: (usize, usize)) -> Segmentation {
    let labels = expand_once(&parent.labels, dims).expect("child dims follow the pyramid");
    let intensities =
        expand_once(&parent.intensities, dims).expect("child dims follow the pyramid");
    Segmentation {
        labels,
        intensities,
        char_intensity: parent.char_intensity.clone(),
        next_label: parent.next_label,
        emergent: parent.emergent.clone(),
    }
}

/// Runs the top-down path from the pyramid top to level 0. The returned
/// states are ordered top first.
pub fn descend(pyramid: &Pyramid, top: Segmentation, cfg: &SegConfig) -> Vec<LevelState> {
    descend_with(pyramid, top, cfg, Execution::default())
}

pub fn descend_with(
    pyramid: &Pyramid,
    top: Segmentation,
    cfg: &SegConfig,
    exec: Execution,
) -> Vec<LevelState> {
    let top_level = pyramid.top_index();
    let mut states = vec![LevelState {
        level: top_level,
        segmentation: top,
        deviant_count_history: Vec::new(),
        seeded_history: Vec::new(),
        pixel_visits: 0,
    }];
    for level in (0..top_level).rev() {
        let reference = pyramid.level(level);
        let inherited = inherit(&states.last().unwrap().segmentation, reference.dims());
        states.push(refine_level_with(reference, inherited, level, cfg, exec));
    }
    states
}

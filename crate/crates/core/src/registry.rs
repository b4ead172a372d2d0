//! The object appearance list: one record per region per level, with size,
//! center of mass, mean intensity, lineage and adjacency.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::coarse::Segmentation;
use crate::error::{Error, Result};
use crate::image::LabelMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Position {
    #[serde(rename = "left-of")]
    LeftOf,
    #[serde(rename = "right-of")]
    RightOf,
    #[serde(rename = "above")]
    Above,
    #[serde(rename = "below")]
    Below,
}

impl Position {
    pub fn opposite(self) -> Self {
        match self {
            Position::LeftOf => Position::RightOf,
            Position::RightOf => Position::LeftOf,
            Position::Above => Position::Below,
            Position::Below => Position::Above,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub other: u32,
    pub position: Position,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub id: u32,
    /// Filled from the enclosing level; not serialized per region.
    #[serde(skip)]
    pub level: usize,
    pub area: usize,
    /// `[x, y]`, pixel centers at integer coordinates, origin top-left.
    pub centroid: [f64; 2],
    pub mean_intensity: f64,
    /// `[x0, y0, x1, y1]`, inclusive.
    pub bbox: [usize; 4],
    pub parent: Option<u32>,
    pub emergent: bool,
    pub adjacent: BTreeSet<u32>,
    /// Relative position of this region to each adjacent one.
    pub relations: Vec<Relation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelObjects {
    pub level: usize,
    pub width: usize,
    pub height: usize,
    pub regions: Vec<RegionRecord>,
}

/// Per-level registries ordered from the top level down to level 0.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectList {
    pub levels: Vec<LevelObjects>,
}

/// Screen-space relation of `a` to `b` from their centroid offset. The
/// horizontal axis wins ties, so coincident centroids give `RightOf`.
pub fn relative_position(a: &RegionRecord, b: &RegionRecord) -> Position {
    let dx = a.centroid[0] - b.centroid[0];
    let dy = a.centroid[1] - b.centroid[1];
    if dx.abs() >= dy.abs() {
        if dx < 0.0 {
            Position::LeftOf
        } else {
            Position::RightOf
        }
    } else if dy < 0.0 {
        Position::Above
    } else {
        Position::Below
    }
}

#[derive(Clone)]
struct Accum {
    area: usize,
    sx: f64,
    sy: f64,
    bbox: [usize; 4],
    adjacent: BTreeSet<u32>,
}

/// Builds one record per label of a finalized segmentation. Parents are
/// left unset; see [`link_parents`].
pub fn register_level(seg: &Segmentation, level: usize) -> Vec<RegionRecord> {
    let (w, h) = seg.dims();
    let labels = seg.labels.as_slice();
    let max = labels.iter().copied().max().unwrap_or(0) as usize;
    let mut dense: Vec<Option<Accum>> = vec![None; max + 1];
    for y in 0..h {
        for x in 0..w {
            let l = labels[y * w + x] as usize;
            let a = dense[l].get_or_insert_with(|| Accum {
                area: 0,
                sx: 0.0,
                sy: 0.0,
                bbox: [x, y, x, y],
                adjacent: BTreeSet::new(),
            });
            a.area += 1;
            a.sx += x as f64;
            a.sy += y as f64;
            a.bbox = [
                a.bbox[0].min(x),
                a.bbox[1].min(y),
                a.bbox[2].max(x),
                a.bbox[3].max(y),
            ];
        }
    }
    for y in 0..h {
        for x in 0..w {
            let l = labels[y * w + x];
            let right = (x + 1 < w).then(|| labels[y * w + x + 1]);
            let down = (y + 1 < h).then(|| labels[(y + 1) * w + x]);
            for m in [right, down].into_iter().flatten() {
                if m != l {
                    dense[l as usize].as_mut().unwrap().adjacent.insert(m);
                    dense[m as usize].as_mut().unwrap().adjacent.insert(l);
                }
            }
        }
    }
    let acc = dense
        .into_iter()
        .enumerate()
        .filter_map(|(id, a)| a.map(|a| (id as u32, a)));

    let mut records: Vec<RegionRecord> = acc
        .into_iter()
        .map(|(id, a)| RegionRecord {
            id,
            level,
            area: a.area,
            centroid: [a.sx / a.area as f64, a.sy / a.area as f64],
            mean_intensity: seg.char_intensity[&id],
            bbox: a.bbox,
            parent: None,
            emergent: seg.emergent.contains(&id),
            adjacent: a.adjacent,
            relations: Vec::new(),
        })
        .collect();

    let index: BTreeMap<u32, usize> = records.iter().enumerate().map(|(i, r)| (r.id, i)).collect();
    let relations: Vec<Vec<Relation>> = records
        .iter()
        .map(|r| {
            r.adjacent
                .iter()
                .map(|&other| Relation {
                    other,
                    position: relative_position(r, &records[index[&other]]),
                })
                .collect()
        })
        .collect();
    for (r, rel) in records.iter_mut().zip(relations) {
        r.relations = rel;
    }
    records
}

/// Majority-vote parent of every child region through the expansion
/// addressing `(x, y) -> (x / 2, y / 2)`. Ties go to the smaller parent
/// label; emergent regions get no parent.
pub fn link_parents(
    child_labels: &LabelMap,
    parent_labels: &LabelMap,
    emergent_ids: &BTreeSet<u32>,
) -> BTreeMap<u32, Option<u32>> {
    let max = child_labels.as_slice().iter().copied().max().unwrap_or(0) as usize;
    let mut dense: Vec<Vec<(u32, usize)>> = vec![Vec::new(); max + 1];
    for y in 0..child_labels.height() {
        for x in 0..child_labels.width() {
            let votes = &mut dense[child_labels.get(x, y) as usize];
            let parent = parent_labels.get(x / 2, y / 2);
            match votes.iter_mut().find(|(p, _)| *p == parent) {
                Some((_, n)) => *n += 1,
                None => votes.push((parent, 1)),
            }
        }
    }
    dense
        .into_iter()
        .enumerate()
        .filter(|(_, votes)| !votes.is_empty())
        .map(|(child, mut hist)| {
            let child = child as u32;
            hist.sort_unstable();
            if emergent_ids.contains(&child) {
                return (child, None);
            }
            // sorted by parent label, so `>` keeps the smallest on ties
            let mut best: Option<(u32, usize)> = None;
            for (p, n) in hist {
                if best.is_none_or(|(_, bn)| n > bn) {
                    best = Some((p, n));
                }
            }
            (child, best.map(|(p, _)| p))
        })
        .collect()
}

impl ObjectList {
    /// Canonical JSON encoding: fixed key order, regions by ascending id.
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("object list serializes");
        out.push(b'\n');
        out
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let mut list: ObjectList =
            serde_json::from_slice(bytes).map_err(|e| Error::InvalidReport(e.to_string()))?;
        for lvl in &mut list.levels {
            for r in &mut lvl.regions {
                r.level = lvl.level;
            }
        }
        Ok(list)
    }

    pub fn level(&self, level: usize) -> Option<&LevelObjects> {
        self.levels.iter().find(|l| l.level == level)
    }
}

/// Serializes an object list to its canonical JSON bytes.
pub fn serialize(objects: &ObjectList) -> Vec<u8> {
    objects.to_json()
}

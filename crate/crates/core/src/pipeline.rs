//! End-to-end orchestration: squeeze, segment the top, descend, register.

use serde::{Deserialize, Serialize};

use crate::coarse::segment_coarse_with;
use crate::config::SegConfig;
use crate::descent::{descend_with, LevelState};
use crate::error::Result;
use crate::exec::Execution;
use crate::image::GrayImage;
use crate::pyramid::{build_pyramid_with, Pyramid};
use crate::registry::{link_parents, register_level, LevelObjects, ObjectList};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    pub width: usize,
    pub height: usize,
    pub region_count: usize,
    pub passes: usize,
    pub deviant_history: Vec<usize>,
    pub pixel_visits: usize,
}

/// Per-level counters, top level first.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub levels: Vec<LevelStats>,
}

impl Stats {
    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("stats serialize");
        out.push(b'\n');
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SegmentationResult {
    pub pyramid: Pyramid,
    /// One state per pyramid level, top level first.
    pub levels: Vec<LevelState>,
    pub objects: ObjectList,
    pub config: SegConfig,
    pub stats: Stats,
}

impl SegmentationResult {
    /// State for pyramid level `level` (0 = original resolution).
    pub fn level(&self, level: usize) -> &LevelState {
        let top = self.pyramid.top_index();
        &self.levels[top - level]
    }
}

pub fn run(image: &GrayImage, cfg: &SegConfig) -> Result<SegmentationResult> {
    run_with(image, cfg, Execution::default())
}

pub fn run_with(image: &GrayImage, cfg: &SegConfig, exec: Execution) -> Result<SegmentationResult> {
    cfg.validate()?;
    let pyramid = build_pyramid_with(image, cfg.min_top_dim, exec);
    let (top, top_visits) = segment_coarse_with(pyramid.top(), cfg, exec);
    let mut levels = descend_with(&pyramid, top, cfg, exec);
    levels[0].pixel_visits = top_visits;

    let mut objects = ObjectList::default();
    for (i, state) in levels.iter().enumerate() {
        let seg = &state.segmentation;
        let mut regions = register_level(seg, state.level);
        if i > 0 {
            let parent = &levels[i - 1].segmentation;
            let links = link_parents(&seg.labels, &parent.labels, &seg.emergent);
            for r in &mut regions {
                r.parent = links[&r.id];
            }
        }
        let (width, height) = seg.dims();
        objects.levels.push(LevelObjects {
            level: state.level,
            width,
            height,
            regions,
        });
    }

    let stats = Stats {
        levels: levels
            .iter()
            .map(|s| {
                let (width, height) = s.segmentation.dims();
                LevelStats {
                    level: s.level,
                    width,
                    height,
                    region_count: s.segmentation.region_count(),
                    passes: s.passes(),
                    deviant_history: s.deviant_count_history.clone(),
                    pixel_visits: s.pixel_visits,
                }
            })
            .collect(),
    };

    Ok(SegmentationResult {
        pyramid,
        levels,
        objects,
        config: cfg.clone(),
        stats,
    })
}

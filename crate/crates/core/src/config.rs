use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pyramid::DEFAULT_MIN_TOP_DIM;

/// Thresholds for every intensity comparison in the pipeline, in gray levels
/// unless noted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegConfig {
    /// A pixel is a border pixel when some 4-neighbor differs by more than this.
    pub border_threshold: f64,
    /// Intensity-similarity tolerance for growth, deviance and refinement.
    pub delta: f64,
    /// Coarse-level regions smaller than this (pixels) are dissolved.
    pub min_region_size: usize,
    /// Orphan components at least this large (pixels) seed new regions.
    pub min_seed_size: usize,
    /// Upper bound on refinement passes per level.
    pub max_refine_iters: usize,
    /// Pyramid building stops once min(width, height) is at most this.
    pub min_top_dim: usize,
}

impl Default for SegConfig {
    fn default() -> Self {
        Self {
            border_threshold: 10.0,
            delta: 15.0,
            min_region_size: 4,
            min_seed_size: 4,
            max_refine_iters: 10,
            min_top_dim: DEFAULT_MIN_TOP_DIM,
        }
    }
}

impl SegConfig {
    pub fn validate(&self) -> Result<()> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig {
                    field,
                    reason: format!("must be a positive finite number, got {v}"),
                })
            }
        }
        fn at_least_one(field: &'static str, v: usize) -> Result<()> {
            if v >= 1 {
                Ok(())
            } else {
                Err(Error::InvalidConfig {
                    field,
                    reason: "must be at least 1".into(),
                })
            }
        }
        positive("border_threshold", self.border_threshold)?;
        positive("delta", self.delta)?;
        at_least_one("min_region_size", self.min_region_size)?;
        at_least_one("min_seed_size", self.min_seed_size)?;
        at_least_one("max_refine_iters", self.max_refine_iters)?;
        at_least_one("min_top_dim", self.min_top_dim)
    }
}

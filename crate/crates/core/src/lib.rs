//! Coarse-to-fine unsupervised grayscale segmentation.
//!
//! The input image is squeezed into an averaging pyramid, the coarsest level
//! is segmented directly, and the label and characteristic-intensity maps are
//! then expanded and refined level by level down to full resolution. Every
//! region found on the way is registered in a per-level object list.
//!
//! ```
//! use tdseg::{run, GrayImage, SegConfig};
//!
//! let image = GrayImage::from_fn(64, 48, |x, _| if x < 32 { 40.0 } else { 180.0 }).unwrap();
//! let result = run(&image, &SegConfig::default()).unwrap();
//! assert_eq!(result.levels.last().unwrap().segmentation.region_count(), 2);
//! ```

pub mod cli;
pub mod coarse;
pub mod components;
pub mod config;
pub mod descent;
pub mod error;
pub mod exec;
pub mod image;
pub mod pipeline;
pub mod pnm;
pub mod pyramid;
pub mod registry;

pub use coarse::{segment_coarse, Segmentation};
pub use config::SegConfig;
pub use descent::LevelState;
pub use error::{Error, Result};
pub use exec::Execution;
pub use image::{GrayImage, Grid, IntensityMap, LabelMap};
pub use pipeline::{run, run_with, SegmentationResult};
pub use pyramid::{build_pyramid, expand_once, shrink_once, Pyramid};
pub use registry::{ObjectList, RegionRecord};

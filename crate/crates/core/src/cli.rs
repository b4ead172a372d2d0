//! Batch front end: read one PGM, segment it, write per-level maps and the
//! JSON reports into an output directory.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;

use crate::config::SegConfig;
use crate::image::{Grid, LabelMap};
use crate::pipeline::{run, SegmentationResult};
use crate::pnm::{read_pgm, write_label_pgm, write_pgm_values};
use crate::pyramid::expand_through;

fn positive_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {v}"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tdseg",
    version,
    about = "Coarse-to-fine unsupervised segmentation of a grayscale PGM image",
    allow_negative_numbers = true
)]
pub struct CliOptions {
    /// Input image (binary PGM, maxval <= 255)
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory, created if absent
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Intensity-similarity tolerance in gray levels
    #[arg(long, default_value_t = 15.0, value_parser = positive_f64)]
    pub delta: f64,
    /// Gradient above which a coarse-level pixel is a border pixel
    #[arg(long, default_value_t = 10.0, value_parser = positive_f64)]
    pub border_threshold: f64,
    /// Minimum coarse-level region size in pixels
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_region_size: u64,
    /// Minimum orphan cluster size that seeds a new region
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_seed_size: u64,
    /// Maximum refinement passes per level
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_iters: u64,
    /// Stop shrinking once the smaller dimension is at most this
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_top_dim: u64,
    /// Also write every map expanded to the original image size
    #[arg(long)]
    pub upscale: bool,
    /// Also write an 8-bit pseudo-color rendering of each label map
    #[arg(long)]
    pub colorize: bool,
}

impl CliOptions {
    pub fn config(&self) -> SegConfig {
        SegConfig {
            border_threshold: self.border_threshold,
            delta: self.delta,
            min_region_size: self.min_region_size as usize,
            min_seed_size: self.min_seed_size as usize,
            max_refine_iters: self.max_iters as usize,
            min_top_dim: self.min_top_dim as usize,
        }
    }
}

/// Stable gray value for a label (Knuth multiplicative hash, top byte).
pub fn palette(label: u32) -> u8 {
    (label.wrapping_mul(2_654_435_761) >> 24) as u8
}

fn colorize(map: &LabelMap) -> Vec<f64> {
    map.as_slice()
        .iter()
        .map(|&l| f64::from(palette(l)))
        .collect()
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), String> {
    fs::write(path, bytes).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

/// Writes every artifact of a finished run into `dir`.
pub fn write_outputs(
    result: &SegmentationResult,
    dir: &Path,
    upscale: bool,
    color: bool,
) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let dims: Vec<(usize, usize)> = result.pyramid.levels().iter().map(|l| l.dims()).collect();
    for state in &result.levels {
        let l = state.level;
        let seg = &state.segmentation;
        let (w, h) = seg.dims();
        let labels = write_label_pgm(&seg.labels).map_err(|e| e.to_string())?;
        write(&dir.join(format!("labels_L{l}.pgm")), &labels)?;
        write(
            &dir.join(format!("intensity_L{l}.pgm")),
            &write_pgm_values(w, h, seg.intensities.as_slice()),
        )?;
        if color {
            write(
                &dir.join(format!("labels_L{l}_color.pgm")),
                &write_pgm_values(w, h, &colorize(&seg.labels)),
            )?;
        }
        if upscale {
            let chain: Vec<(usize, usize)> = dims[..l].iter().rev().copied().collect();
            let (fw, fh) = dims[0];
            let full_labels: Grid<u32> =
                expand_through(&seg.labels, &chain).map_err(|e| e.to_string())?;
            let full_int = expand_through(&seg.intensities, &chain).map_err(|e| e.to_string())?;
            let bytes = write_label_pgm(&full_labels).map_err(|e| e.to_string())?;
            write(&dir.join(format!("labels_L{l}_full.pgm")), &bytes)?;
            write(
                &dir.join(format!("intensity_L{l}_full.pgm")),
                &write_pgm_values(fw, fh, full_int.as_slice()),
            )?;
            if color {
                write(
                    &dir.join(format!("labels_L{l}_full_color.pgm")),
                    &write_pgm_values(fw, fh, &colorize(&full_labels)),
                )?;
            }
        }
    }
    write(&dir.join("objects.json"), &result.objects.to_json())?;
    write(&dir.join("stats.json"), &result.stats.to_json())
}

/// Runs the CLI. Returns the process exit code: 0 on success, 1 on input or
/// output errors, 2 on bad flags.
pub fn main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let opts = match CliOptions::try_parse_from(argv) {
        Ok(o) => o,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let rendered = e.to_string();
            eprintln!(
                "tdseg: {}",
                rendered
                    .lines()
                    .next()
                    .unwrap_or("invalid arguments")
                    .trim_start_matches("error: ")
            );
            return 2;
        }
    };
    match execute(&opts) {
        Ok(()) => 0,
        Err(msg) => {
            eprintln!("tdseg: {msg}");
            1
        }
    }
}

fn execute(opts: &CliOptions) -> Result<(), String> {
    let bytes =
        fs::read(&opts.input).map_err(|e| format!("cannot read {}: {e}", opts.input.display()))?;
    let image = read_pgm(&bytes).map_err(|e| format!("{}: {e}", opts.input.display()))?;
    let result = run(&image, &opts.config()).map_err(|e| e.to_string())?;
    write_outputs(&result, &opts.out_dir, opts.upscale, opts.colorize)
}

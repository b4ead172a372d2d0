mod common;

use std::collections::BTreeSet;

use common::{components_per_label, oracle_refine_pass, pad_even};
use proptest::prelude::*;
use tdseg::descent::{inherit, refine_level, refine_pass};
use tdseg::pnm::{read_pgm, write_pgm};
use tdseg::pyramid::expand_once;
use tdseg::{run, segment_coarse, shrink_once, GrayImage, Grid, SegConfig, Segmentation};

fn image(max: usize) -> impl Strategy<Value = GrayImage> {
    (1..=max, 1..=max).prop_flat_map(|(w, h)| {
        proptest::collection::vec(0u8..=255, w * h).prop_map(move |px| {
            GrayImage::new(w, h, px.into_iter().map(f64::from).collect()).unwrap()
        })
    })
}

/// Piecewise-constant image with mild noise: a handful of tones in vertical bands.
fn banded(max: usize) -> impl Strategy<Value = GrayImage> {
    (
        4..=max,
        4..=max,
        proptest::collection::vec(0u8..=255, 1..4),
        any::<u64>(),
    )
        .prop_map(|(w, h, tones, seed)| {
            GrayImage::from_fn(w, h, |x, y| {
                let band = x * tones.len() / w;
                let jitter = ((seed ^ (x as u64 * 31 + y as u64 * 17)) % 7) as f64;
                f64::from(tones[band]) + jitter
            })
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shrink_preserves_padded_mean(img in image(40)) {
        let padded = pad_even(&img);
        let n = (padded.len() * padded[0].len()) as f64;
        let mean = padded.iter().flatten().sum::<f64>() / n;
        prop_assert!((shrink_once(&img).mean() - mean).abs() <= 1e-9);
    }

    #[test]
    fn expansion_addresses_parent(w in 1usize..30, h in 1usize..30, seed in any::<u32>()) {
        let parent = Grid::from_fn(w.div_ceil(2), h.div_ceil(2), |x, y| (x as u32 * 7 + y as u32 * 3) ^ seed);
        let child = expand_once(&parent, (w, h)).unwrap();
        for y in 0..h {
            for x in 0..w {
                prop_assert_eq!(child.get(x, y), parent.get(x / 2, y / 2));
            }
        }
    }

    #[test]
    fn pgm_roundtrip(img in image(24)) {
        prop_assert_eq!(read_pgm(&write_pgm(&img)).unwrap(), img.clone());
        let bytes = write_pgm(&img);
        prop_assert_eq!(write_pgm(&read_pgm(&bytes).unwrap()), bytes);
    }

    #[test]
    fn coarse_segmentation_invariants(img in image(20)) {
        let seg = segment_coarse(&img, &SegConfig::default());
        let areas = seg.areas();
        prop_assert_eq!(areas.values().sum::<usize>(), img.pixels().len());
        prop_assert!(components_per_label(&seg.labels).values().all(|&c| c == 1));
        for (&l, &ci) in &seg.char_intensity {
            let vals: Vec<f64> = seg.labels.as_slice().iter().zip(img.pixels())
                .filter(|(&m, _)| m == l).map(|(_, &v)| v).collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(lo <= ci && ci <= hi);
        }
        prop_assert_eq!(seg.next_label, seg.labels.as_slice().iter().max().unwrap() + 1);
        prop_assert_eq!(segment_coarse(&img, &SegConfig::default()), seg);
    }

    #[test]
    fn homogeneous_images_form_one_region(w in 1usize..20, h in 1usize..20, base in 0.0f64..240.0, seed in any::<u64>()) {
        // values span base..=base+3: no borders, and every pixel is within delta
        let img = GrayImage::from_fn(w, h, |x, y| base + ((seed >> ((x + 2 * y) % 60)) % 4) as f64)
            .unwrap();
        let seg = segment_coarse(&img, &SegConfig::default());
        prop_assert_eq!(seg.region_count(), 1);
    }

    #[test]
    fn refine_pass_matches_oracle(img in image(8), k in 1u32..4, seed in any::<u64>()) {
        let (w, h) = img.dims();
        let parent = Grid::from_fn(w.div_ceil(2), h.div_ceil(2), |x, y| 1 + ((seed >> (x + 3 * y)) as u32 % k));
        let present: BTreeSet<u32> = parent.as_slice().iter().copied().collect();
        let ci = present.iter().map(|&l| (l, f64::from(l) * 60.0)).collect();
        let parent = Segmentation::from_parts(parent, ci, k + 1, BTreeSet::new());
        let inherited = inherit(&parent, (w, h));
        let cfg = SegConfig::default();
        let got = refine_pass(&img, &inherited, &cfg);
        let want = oracle_refine_pass(&img, &inherited, cfg.delta);
        prop_assert_eq!(got.segmentation.labels.as_slice(), &want.labels[..]);
        prop_assert_eq!(&got.segmentation.char_intensity, &want.char_intensity);
        prop_assert_eq!(got.orphans, want.orphans);

        let state = refine_level(&img, inherited, 0, &cfg);
        prop_assert!(state.passes() <= cfg.max_refine_iters);
        prop_assert_eq!(state.segmentation.areas().values().sum::<usize>(), w * h);
        prop_assert!(components_per_label(&state.segmentation.labels).values().all(|&c| c == 1));
        for &l in state.segmentation.labels.as_slice() {
            prop_assert!(state.segmentation.char_intensity.contains_key(&l));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pipeline_is_deterministic_and_consistent(img in banded(80)) {
        let cfg = SegConfig::default();
        let a = run(&img, &cfg).unwrap();
        let b = run(&img, &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.level(0).segmentation.dims(), img.dims());
        common::check_registry(&a).map_err(TestCaseError::fail)?;
        for s in &a.levels {
            let seg = &s.segmentation;
            for (p, &l) in seg.labels.as_slice().iter().enumerate() {
                prop_assert_eq!(seg.intensities.as_slice()[p], seg.char_intensity[&l]);
            }
        }
        for pair in a.objects.levels.iter() {
            for r in &pair.regions {
                for rel in &r.relations {
                    let other = pair.regions.iter().find(|o| o.id == rel.other).unwrap();
                    let back = tdseg::registry::relative_position(other, r);
                    prop_assert_eq!(back, rel.position.opposite());
                }
            }
        }
        let json = a.objects.to_json();
        let reparsed = tdseg::ObjectList::from_json(&json).unwrap();
        prop_assert_eq!(reparsed.to_json(), json);
    }
}

#[test]
fn expanded_maps_match_parent_before_refinement() {
    let img = common::multi_scale();
    let res = run(&img, &SegConfig::default()).unwrap();
    for pair in res.levels.windows(2) {
        let dims = pair[1].segmentation.dims();
        let inherited = inherit(&pair[0].segmentation, dims);
        for y in 0..dims.1 {
            for x in 0..dims.0 {
                assert_eq!(
                    inherited.labels.get(x, y),
                    pair[0].segmentation.labels.get(x / 2, y / 2)
                );
            }
        }
    }
}

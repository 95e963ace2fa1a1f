mod common;

use std::sync::OnceLock;

use proptest::prelude::*;

use uwbsar_core::features::{
    detect_and_describe, detect_corners, DetectorConfig, FeatureDetector, FeatureSet,
};
use uwbsar_core::image::{warp_similarity, Gray8, PixelSimilarity};
use uwbsar_core::loopclose::{match_regions, MatchSettings};

use common::{five_scatterers, gray_of, random_scene, shift};

fn scene_image() -> &'static Gray8 {
    static IMG: OnceLock<Gray8> = OnceLock::new();
    IMG.get_or_init(|| gray_of(&five_scatterers(), 1))
}

fn busy_image() -> &'static Gray8 {
    static IMG: OnceLock<Gray8> = OnceLock::new();
    IMG.get_or_init(|| gray_of(&random_scene(42, 12), 2))
}

fn uncapped(mut cfg: DetectorConfig) -> DetectorConfig {
    cfg.target_keypoints = usize::MAX;
    cfg
}

fn both() -> [DetectorConfig; 2] {
    [DetectorConfig::orb(), DetectorConfig::brisk()]
}

#[test]
fn detection_is_deterministic() {
    for cfg in both() {
        let a = detect_and_describe(busy_image(), &cfg).unwrap();
        let b = detect_and_describe(&busy_image().clone(), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(!a.keypoints.is_empty());
    }
}

fn scaled_down(img: &Gray8, span: u8) -> Gray8 {
    Gray8::new(
        img.width,
        img.height,
        img.pixels
            .iter()
            .map(|&p| (p as u16 * span as u16 / 255) as u8)
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn keypoint_count_falls_with_threshold(t in 1u8..60, dt in 1u8..40) {
        let img = busy_image();
        let count = |threshold: u8| {
            let cfg = DetectorConfig { corner_threshold: threshold, ..uncapped(DetectorConfig::orb()) };
            detect_corners(img, &cfg).unwrap().len()
        };
        prop_assert!(count(t.saturating_add(dt)) <= count(t));
    }

    #[test]
    fn brightness_offset_keeps_descriptors(offset in 1u8..=80) {
        // leave headroom so nothing clips
        let base = scaled_down(scene_image(), 170);
        let brighter = Gray8::new(base.width, base.height, base.pixels.iter().map(|&p| p + offset).collect()).unwrap();
        for cfg in both() {
            let a = detect_and_describe(&base, &cfg).unwrap();
            let b = detect_and_describe(&brighter, &cfg).unwrap();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn integer_shift_moves_full_resolution_keypoints(dx in -25isize..=25, dy in -25isize..=25) {
        let img = busy_image();
        let moved = shift(img, dx, dy);
        for cfg in both() {
            let cfg = uncapped(cfg);
            let a = detect_and_describe(img, &cfg).unwrap();
            let b = detect_and_describe(&moved, &cfg).unwrap();
            let margin = 60.0;
            let inner = |x: f32, y: f32| {
                x >= margin && y >= margin && x < img.width as f32 - margin && y < img.height as f32 - margin
            };
            let mut checked = 0;
            for (k, d) in a.keypoints.iter().zip(&a.descriptors) {
                if k.octave != 0 || !inner(k.x, k.y) {
                    continue;
                }
                let (x, y) = (k.x + dx as f32, k.y + dy as f32);
                let hit = b.keypoints.iter().position(|q| q.octave == 0 && q.x == x && q.y == y);
                prop_assert!(hit.is_some(), "{}: keypoint ({}, {}) lost", cfg.detector, k.x, k.y);
                prop_assert_eq!(&b.descriptors[hit.unwrap()], d);
                checked += 1;
            }
            prop_assert!(checked > 0);
        }
    }
}

fn registration(img: &Gray8, deg: f64) -> Vec<(String, f64, f64, f64, f64)> {
    let (cx, cy) = (img.width as f64 / 2.0, img.height as f64 / 2.0);
    let r = deg.to_radians();
    // rotate about the image centre
    let warp = PixelSimilarity {
        scale: 1.0,
        rotation_rad: r,
        tx: cx - (r.cos() * cx - r.sin() * cy),
        ty: cy - (r.sin() * cx + r.cos() * cy),
    };
    let moved = warp_similarity(img, &warp, 0);
    let [orb, brisk] = both();
    let detectors: [&dyn FeatureDetector; 2] = [&orb, &brisk];
    let settings = MatchSettings {
        resolution_m: 1.0,
        ..MatchSettings::default()
    };
    match_regions(img, &moved, &detectors, &settings)
        .unwrap()
        .into_iter()
        .map(|rep| {
            let t = rep.transform.expect("transform");
            (
                rep.detector.to_string(),
                t.scale - 1.0,
                (t.rot_deg() - deg + 540.0).rem_euclid(360.0) - 180.0,
                (t.tx_m - warp.tx).hypot(t.ty_m - warp.ty),
                rep.good_fraction(),
            )
        })
        .collect()
}

#[test]
fn descriptors_survive_rotation() {
    for deg in [-40.0, 15.0, 30.0, 90.0, 135.0, 180.0] {
        for (det, ds, drot, dt, good) in registration(scene_image(), deg) {
            assert!(
                ds.abs() <= 0.02 && drot.abs() <= 0.5 && dt <= 2.0 && good >= 0.34,
                "{det} at {deg} deg: scale err {ds:.4}, rot err {drot:.3}, t err {dt:.2} px, good {good:.2}"
            );
        }
    }
}

#[test]
fn feature_sets_report_native_lengths() {
    for cfg in both() {
        let set: FeatureSet = cfg.detect_and_describe(scene_image()).unwrap();
        assert_eq!(set.descriptor_bits, cfg.detector.native_bits().unwrap());
        assert!(set.keypoints.len() <= cfg.target_keypoints);
        assert!(set
            .descriptors
            .iter()
            .all(|d| d.bits() == set.descriptor_bits));
    }
}

mod common;

use proptest::prelude::*;

use uwbsar_core::features::{Descriptor, DetectorConfig, DetectorId, FeatureSet, Keypoint};
use uwbsar_core::geometry::Point2;
use uwbsar_core::loopclose::{
    detect_loop, estimate_similarity_ransac, fuse_transform, knn_match, match_features, ratio_test,
    validate_loop, LoopThresholds, MatchPair, MatchSettings, RansacConfig, SimilarityTransform,
};

use common::{gray_of, random_scene};

fn set_of(descriptors: Vec<Vec<u8>>) -> FeatureSet {
    FeatureSet {
        detector: DetectorId::ORB,
        descriptor_bits: 256,
        keypoints: (0..descriptors.len())
            .map(|i| Keypoint {
                x: i as f32,
                y: 0.0,
                response: 1.0,
                angle: 0.0,
                octave: 0,
            })
            .collect(),
        descriptors: descriptors
            .into_iter()
            .map(|bytes| Descriptor { bytes })
            .collect(),
    }
}

fn descriptors(n: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Vec<u8>>> {
    // a narrow byte alphabet makes equal distances, and so ties, common
    prop::collection::vec(
        prop::collection::vec(prop::sample::select(vec![0u8, 1, 3, 255]), 32),
        n,
    )
}

fn oracle(a: &FeatureSet, b: &FeatureSet) -> Vec<MatchPair> {
    let mut out = Vec::new();
    for (i, q) in a.descriptors.iter().enumerate() {
        let (mut best, mut second) = ((u32::MAX, usize::MAX), (u32::MAX, usize::MAX));
        for (j, t) in b.descriptors.iter().enumerate() {
            let d = q.hamming(t);
            if d < best.0 {
                second = best;
                best = (d, j);
            } else if d < second.0 {
                second = (d, j);
            }
        }
        out.push(MatchPair {
            index_a: i,
            index_b: best.1,
            distance: best.0,
            second_distance: second.0,
        });
    }
    out
}

fn transform() -> impl Strategy<Value = SimilarityTransform> {
    (
        0.5f64..1.5,
        -500.0f64..500.0,
        -500.0f64..500.0,
        -180.0f64..180.0,
    )
        .prop_map(|(s, x, y, r)| SimilarityTransform::from_mm_deg(s, x, y, r))
}

proptest! {
    #[test]
    fn knn_equals_exhaustive_search(a in descriptors(1..60), b in descriptors(2..100)) {
        let (a, b) = (set_of(a), set_of(b));
        prop_assert_eq!(knn_match(&a, &b).unwrap(), oracle(&a, &b));
    }

    #[test]
    fn ratio_test_filters_and_is_idempotent(a in descriptors(1..40), b in descriptors(2..40), ratio in 0.05f64..0.99) {
        let m = knn_match(&set_of(a), &set_of(b)).unwrap();
        let once = ratio_test(&m, ratio).unwrap();
        prop_assert!(once.iter().all(|p| m.contains(p)));
        prop_assert_eq!(ratio_test(&once, ratio).unwrap(), once);
    }

    #[test]
    fn fusion_ignores_argument_order(ta in transform(), tb in transform(), na in 0usize..200, nb in 1usize..200) {
        let ab = fuse_transform(&ta, na, &tb, nb).unwrap();
        let ba = fuse_transform(&tb, nb, &ta, na).unwrap();
        prop_assert!((ab.scale - ba.scale).abs() <= 1e-12);
        prop_assert!((ab.tx_m - ba.tx_m).abs() <= 1e-12);
        prop_assert!((ab.ty_m - ba.ty_m).abs() <= 1e-12);
        prop_assert!((ab.rot_rad - ba.rot_rad).abs() <= 1e-12);
    }

    #[test]
    fn ransac_is_deterministic(
        pts in prop::collection::vec((0.0f64..400.0, 0.0f64..400.0, 0.0f64..400.0, 0.0f64..400.0), 2..40),
        seed in any::<u64>(),
    ) {
        let src: Vec<Point2> = pts.iter().map(|p| Point2::new(p.0, p.1)).collect();
        let dst: Vec<Point2> = pts.iter().map(|p| Point2::new(p.2, p.3)).collect();
        let cfg = RansacConfig { iterations: 200, ..RansacConfig::default() };
        let one = estimate_similarity_ransac(&src, &dst, seed, &cfg).unwrap();
        let two = estimate_similarity_ransac(&src, &dst, seed, &cfg).unwrap();
        prop_assert_eq!(one, two);
    }
}

#[test]
fn mismatched_detectors_are_named() {
    let a = set_of(vec![vec![0; 32]; 3]);
    let mut b = a.clone();
    b.detector = DetectorId::BRISK;
    let err = match_features(&a, &b, &MatchSettings::default())
        .unwrap_err()
        .to_string();
    assert!(err.contains("orb") && err.contains("brisk"), "{err}");
}

#[test]
fn same_place_accepted_other_place_rejected() {
    let (orb, brisk) = (DetectorConfig::orb(), DetectorConfig::brisk());
    let scene = random_scene(7, 12);
    let a = gray_of(&scene, 1);
    let again = gray_of(&scene, 2);
    let other = gray_of(&random_scene(8, 12), 3);
    let th = LoopThresholds::default();
    let s = MatchSettings::default();
    let same = detect_loop(&a, &again, &orb, &brisk, &s, &th).unwrap();
    assert!(same.accepted, "{:?}", same.reasons);
    let t = same.fused_transform.unwrap();
    assert_eq!(t.scale, 1.0);
    assert!(t.tx_mm().abs() < 10.0 && t.ty_mm().abs() < 10.0);
    let diff = detect_loop(&a, &other, &orb, &brisk, &s, &th).unwrap();
    assert!(!diff.accepted);
    assert!(!diff.reasons.is_empty());

    let reports = [same.reports[0].clone(), same.reports[1].clone()];
    assert!(validate_loop(&reports[0], &reports[0], &th).is_err());
}

//! Region matching and loop-closure validation.
//!
//! Per detector: brute-force two-nearest-neighbour Hamming matching, Lowe's
//! ratio test, then RANSAC similarity estimation; the RANSAC inliers are the
//! "good" matches. A loop between two regions is accepted only when two
//! different detectors both find enough good matches and agree on the
//! transform: both scales close to one and translations and rotations close
//! to each other. The accepted transform is the match-count weighted mean of
//! the two estimates.

mod ransac;

use alloc::vec::Vec;
use core::fmt;

pub use ransac::{
    estimate_similarity_ransac, fit_similarity, similarity_from_two, RansacConfig, RansacResult,
};

use crate::features::{DetectorId, FeatureDetector, FeatureError, FeatureSet};
use crate::geometry::{normalize_angle, Point2};
use crate::image::{Gray8, PixelSimilarity};
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LoopError {
    #[error("cannot match {0} features against {1} features")]
    DetectorMismatch(DetectorId, DetectorId),
    #[error("descriptor lengths differ: {0} vs {1} bits")]
    DescriptorLengthMismatch(usize, usize),
    #[error("query set is empty")]
    EmptyQuery,
    #[error("train set has {0} descriptors, need at least 2")]
    TooFewTrainDescriptors(usize),
    #[error("ratio must lie in (0, 1), got {0}")]
    InvalidRatio(f64),
    #[error("need at least 2 correspondences, got {0}")]
    TooFewCorrespondences(usize),
    #[error("correspondence lists differ in length: {0} vs {1}")]
    CorrespondenceLength(usize, usize),
    #[error("loop validation needs reports from two different detectors, got {0} twice")]
    SameDetector(DetectorId),
    #[error("cannot fuse transforms with zero total weight")]
    ZeroWeight,
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchPair {
    pub index_a: usize,
    pub index_b: usize,
    pub distance: u32,
    pub second_distance: u32,
}

/// For every descriptor of `a`, its two nearest descriptors in `b`.
/// Ties go to the lower index in `b`.
pub fn knn_match(a: &FeatureSet, b: &FeatureSet) -> Result<Vec<MatchPair>, LoopError> {
    if a.detector != b.detector {
        return Err(LoopError::DetectorMismatch(a.detector, b.detector));
    }
    if a.descriptor_bits != b.descriptor_bits {
        return Err(LoopError::DescriptorLengthMismatch(
            a.descriptor_bits,
            b.descriptor_bits,
        ));
    }
    if a.descriptors.is_empty() {
        return Err(LoopError::EmptyQuery);
    }
    if b.descriptors.len() < 2 {
        return Err(LoopError::TooFewTrainDescriptors(b.descriptors.len()));
    }
    Ok(a.descriptors
        .iter()
        .enumerate()
        .map(|(ia, da)| {
            let (mut best, mut second) = ((u32::MAX, 0usize), (u32::MAX, 0usize));
            for (ib, db) in b.descriptors.iter().enumerate() {
                let d = da.hamming(db);
                if d < best.0 {
                    second = best;
                    best = (d, ib);
                } else if d < second.0 {
                    second = (d, ib);
                }
            }
            MatchPair {
                index_a: ia,
                index_b: best.1,
                distance: best.0,
                second_distance: second.0,
            }
        })
        .collect())
}

/// Keeps pairs with `distance < ratio * second_distance`; a zero second
/// distance keeps the pair only if the best distance is zero too.
pub fn ratio_test(matches: &[MatchPair], ratio: f64) -> Result<Vec<MatchPair>, LoopError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(LoopError::InvalidRatio(ratio));
    }
    Ok(matches
        .iter()
        .filter(|m| {
            if m.second_distance == 0 {
                m.distance == 0
            } else {
                (m.distance as f64) < ratio * m.second_distance as f64
            }
        })
        .copied()
        .collect())
}

/// Similarity between two map regions in metric units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimilarityTransform {
    pub scale: f64,
    pub tx_m: f64,
    pub ty_m: f64,
    pub rot_rad: f64,
}

impl SimilarityTransform {
    pub const IDENTITY: SimilarityTransform = SimilarityTransform {
        scale: 1.0,
        tx_m: 0.0,
        ty_m: 0.0,
        rot_rad: 0.0,
    };

    /// Converts a pixel-space similarity using the image resolution.
    pub fn from_pixels(t: &PixelSimilarity, resolution_m: f64) -> Self {
        Self {
            scale: t.scale,
            tx_m: t.tx * resolution_m,
            ty_m: t.ty * resolution_m,
            rot_rad: normalize_angle(t.rotation_rad),
        }
    }

    /// Builds a transform from the reporting units: millimetres and degrees.
    pub fn from_mm_deg(scale: f64, tx_mm: f64, ty_mm: f64, rot_deg: f64) -> Self {
        Self {
            scale,
            tx_m: tx_mm / 1000.0,
            ty_m: ty_mm / 1000.0,
            rot_rad: rot_deg.to_radians(),
        }
    }

    pub fn tx_mm(&self) -> f64 {
        self.tx_m * 1000.0
    }

    pub fn ty_mm(&self) -> f64 {
        self.ty_m * 1000.0
    }

    pub fn rot_deg(&self) -> f64 {
        self.rot_rad.to_degrees()
    }
}

/// Outcome of matching one region pair with one detector.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchReport {
    pub detector: DetectorId,
    pub keypoints_a: usize,
    pub keypoints_b: usize,
    /// Matches surviving the ratio test.
    pub total_matches: usize,
    /// RANSAC inliers among them.
    pub good_matches: usize,
    pub transform: Option<SimilarityTransform>,
}

impl MatchReport {
    /// Good matches as a fraction of ratio-test survivors; zero when there are none.
    pub fn good_fraction(&self) -> f64 {
        if self.total_matches == 0 {
            0.0
        } else {
            self.good_matches as f64 / self.total_matches as f64
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MatchSettings {
    pub ratio: f64,
    pub ransac: RansacConfig,
    pub seed: u64,
    /// Metres per pixel of the matched images.
    pub resolution_m: f64,
}

impl Default for MatchSettings {
    fn default() -> Self {
        Self {
            ratio: 0.75,
            ransac: RansacConfig::default(),
            seed: 0,
            resolution_m: 0.005,
        }
    }
}

/// Ratio-tested KNN matching and RANSAC between two feature sets.
///
/// Sets too small to match produce an empty report rather than an error.
pub fn match_features(
    a: &FeatureSet,
    b: &FeatureSet,
    settings: &MatchSettings,
) -> Result<MatchReport, LoopError> {
    if a.detector != b.detector {
        return Err(LoopError::DetectorMismatch(a.detector, b.detector));
    }
    let mut report = MatchReport {
        detector: a.detector,
        keypoints_a: a.len(),
        keypoints_b: b.len(),
        total_matches: 0,
        good_matches: 0,
        transform: None,
    };
    if a.descriptors.is_empty() || b.descriptors.len() < 2 {
        return Ok(report);
    }
    let kept = ratio_test(&knn_match(a, b)?, settings.ratio)?;
    report.total_matches = kept.len();
    if kept.len() < 2 {
        return Ok(report);
    }
    let src: Vec<Point2> = kept
        .iter()
        .map(|m| {
            Point2::new(
                a.keypoints[m.index_a].x as f64,
                a.keypoints[m.index_a].y as f64,
            )
        })
        .collect();
    let dst: Vec<Point2> = kept
        .iter()
        .map(|m| {
            Point2::new(
                b.keypoints[m.index_b].x as f64,
                b.keypoints[m.index_b].y as f64,
            )
        })
        .collect();
    if let Some(r) = estimate_similarity_ransac(&src, &dst, settings.seed, &settings.ransac)? {
        report.good_matches = r.inlier_count();
        report.transform = Some(SimilarityTransform::from_pixels(
            &r.transform,
            settings.resolution_m,
        ));
    }
    Ok(report)
}

/// Full pipeline per detector: detection, description, matching, RANSAC.
pub fn match_regions(
    img_a: &Gray8,
    img_b: &Gray8,
    detectors: &[&dyn FeatureDetector],
    settings: &MatchSettings,
) -> Result<Vec<MatchReport>, LoopError> {
    detectors
        .iter()
        .map(|d| {
            let fa = d.detect_and_describe(img_a)?;
            let fb = d.detect_and_describe(img_b)?;
            match_features(&fa, &fb, settings)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopThresholds {
    pub min_good_matches: usize,
    /// Allowed `|scale - 1|`.
    pub scale_tolerance: f64,
    /// Allowed cross-detector disagreement in each translation component.
    pub translation_tolerance_m: f64,
    /// Allowed cross-detector disagreement in rotation.
    pub rotation_tolerance_rad: f64,
}

impl Default for LoopThresholds {
    fn default() -> Self {
        Self {
            min_good_matches: 20,
            scale_tolerance: 0.05,
            translation_tolerance_m: 0.1,
            rotation_tolerance_rad: 2f64.to_radians(),
        }
    }
}

/// Why a loop candidate was rejected.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rejection {
    TooFewMatches {
        detector: DetectorId,
        good: usize,
        required: usize,
    },
    NoTransform {
        detector: DetectorId,
    },
    Scale {
        detector: DetectorId,
        scale: f64,
    },
    Translation {
        dx_m: f64,
        dy_m: f64,
    },
    Rotation {
        drot_rad: f64,
    },
}

impl Rejection {
    /// Short machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Rejection::TooFewMatches { .. } => "match_count",
            Rejection::NoTransform { .. } => "no_transform",
            Rejection::Scale { .. } => "scale",
            Rejection::Translation { .. } => "translation",
            Rejection::Rotation { .. } => "rotation",
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Rejection::TooFewMatches {
                detector,
                good,
                required,
            } => {
                write!(f, "match_count({detector}:{good}<{required})")
            }
            Rejection::NoTransform { detector } => write!(f, "no_transform({detector})"),
            Rejection::Scale { detector, scale } => write!(f, "scale({detector}:{scale:.4})"),
            Rejection::Translation { dx_m, dy_m } => {
                write!(
                    f,
                    "translation(dx={:.1}mm,dy={:.1}mm)",
                    dx_m * 1e3,
                    dy_m * 1e3
                )
            }
            Rejection::Rotation { drot_rad } => {
                write!(f, "rotation({:.2}deg)", drot_rad.to_degrees())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LoopDecision {
    pub accepted: bool,
    pub fused_transform: Option<SimilarityTransform>,
    pub reports: Vec<MatchReport>,
    pub reasons: Vec<Rejection>,
}

/// Applies the two-detector acceptance rule and fuses the transforms on success.
pub fn validate_loop(
    a: &MatchReport,
    b: &MatchReport,
    thresholds: &LoopThresholds,
) -> Result<LoopDecision, LoopError> {
    if a.detector == b.detector {
        return Err(LoopError::SameDetector(a.detector));
    }
    let mut reasons = Vec::new();
    for r in [a, b] {
        if r.good_matches < thresholds.min_good_matches {
            reasons.push(Rejection::TooFewMatches {
                detector: r.detector,
                good: r.good_matches,
                required: thresholds.min_good_matches,
            });
        }
        match r.transform {
            None => reasons.push(Rejection::NoTransform {
                detector: r.detector,
            }),
            Some(t) if !((t.scale - 1.0).abs() <= thresholds.scale_tolerance) => {
                reasons.push(Rejection::Scale {
                    detector: r.detector,
                    scale: t.scale,
                });
            }
            Some(_) => {}
        }
    }
    if let (Some(ta), Some(tb)) = (a.transform, b.transform) {
        let (dx, dy) = (ta.tx_m - tb.tx_m, ta.ty_m - tb.ty_m);
        if !(dx.abs() <= thresholds.translation_tolerance_m
            && dy.abs() <= thresholds.translation_tolerance_m)
        {
            reasons.push(Rejection::Translation { dx_m: dx, dy_m: dy });
        }
        let drot = normalize_angle(ta.rot_rad - tb.rot_rad);
        if !(drot.abs() <= thresholds.rotation_tolerance_rad) {
            reasons.push(Rejection::Rotation { drot_rad: drot });
        }
    }
    let accepted = reasons.is_empty();
    let fused_transform = if accepted {
        let (ta, tb) = (a.transform.expect("checked"), b.transform.expect("checked"));
        let mut fused = fuse_transform(&ta, a.good_matches, &tb, b.good_matches)?;
        if (fused.scale - 1.0).abs() <= thresholds.scale_tolerance {
            fused.scale = 1.0;
        }
        Some(fused)
    } else {
        None
    };
    Ok(LoopDecision {
        accepted,
        fused_transform,
        reports: alloc::vec![a.clone(), b.clone()],
        reasons,
    })
}

/// Weighted mean of two transforms with weights `na` and `nb`.
///
/// Translation and scale are averaged linearly and rotation on the circle.
/// A zero weight returns the other transform unchanged.
pub fn fuse_transform(
    ta: &SimilarityTransform,
    na: usize,
    tb: &SimilarityTransform,
    nb: usize,
) -> Result<SimilarityTransform, LoopError> {
    match (na, nb) {
        (0, 0) => return Err(LoopError::ZeroWeight),
        (_, 0) => return Ok(*ta),
        (0, _) => return Ok(*tb),
        _ => {}
    }
    let (wa, wb) = (na as f64, nb as f64);
    let total = wa + wb;
    let mean = |x: f64, y: f64| (wa * x + wb * y) / total;
    let sin = wa * ta.rot_rad.sin() + wb * tb.rot_rad.sin();
    let cos = wa * ta.rot_rad.cos() + wb * tb.rot_rad.cos();
    Ok(SimilarityTransform {
        scale: mean(ta.scale, tb.scale),
        tx_m: mean(ta.tx_m, tb.tx_m),
        ty_m: mean(ta.ty_m, tb.ty_m),
        rot_rad: sin.atan2(cos),
    })
}

/// Matches two regions with two detectors and validates the loop.
pub fn detect_loop(
    img_a: &Gray8,
    img_b: &Gray8,
    first: &dyn FeatureDetector,
    second: &dyn FeatureDetector,
    settings: &MatchSettings,
    thresholds: &LoopThresholds,
) -> Result<LoopDecision, LoopError> {
    let reports = match_regions(img_a, img_b, &[first, second], settings)?;
    validate_loop(&reports[0], &reports[1], thresholds)
}

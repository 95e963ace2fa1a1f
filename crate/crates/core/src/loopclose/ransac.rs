//! Robust 4-DOF similarity estimation from point correspondences.
//!
//! Points are treated as complex numbers, so a similarity is `q = a p + t`
//! with complex `a` (scale and rotation). Two correspondences determine a
//! model exactly; the final model is the least-squares fit to all inliers.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LoopError;
use crate::geometry::Point2;
use crate::image::PixelSimilarity;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RansacConfig {
    pub iterations: usize,
    /// Maximum reprojection error of an inlier, in pixels.
    pub inlier_threshold_px: f64,
    /// Fewer inliers than this means no model is reported.
    pub min_inliers: usize,
}

impl Default for RansacConfig {
    fn default() -> Self {
        Self {
            iterations: 2000,
            inlier_threshold_px: 3.0,
            min_inliers: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RansacResult {
    pub transform: PixelSimilarity,
    pub inliers: Vec<bool>,
}

impl RansacResult {
    pub fn inlier_count(&self) -> usize {
        self.inliers.iter().filter(|&&b| b).count()
    }
}

#[derive(Clone, Copy, Debug)]
struct Model {
    a: Complex64,
    t: Complex64,
}

impl Model {
    fn apply(&self, p: Complex64) -> Complex64 {
        self.a * p + self.t
    }

    fn to_similarity(self) -> PixelSimilarity {
        PixelSimilarity {
            scale: self.a.norm(),
            rotation_rad: self.a.arg(),
            tx: self.t.re,
            ty: self.t.im,
        }
    }
}

fn c(p: &Point2) -> Complex64 {
    Complex64::new(p.x, p.y)
}

fn minimal(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> Option<Model> {
    let dp = p2 - p1;
    if dp.norm_sqr() < 1e-18 {
        return None;
    }
    let a = (q2 - q1) / dp;
    if a.norm_sqr() < 1e-18 || !a.re.is_finite() || !a.im.is_finite() {
        return None;
    }
    Some(Model { a, t: q1 - a * p1 })
}

/// Exact similarity mapping `p1 -> q1` and `p2 -> q2`; `None` when degenerate.
pub fn similarity_from_two(
    p1: Point2,
    p2: Point2,
    q1: Point2,
    q2: Point2,
) -> Option<PixelSimilarity> {
    minimal(c(&p1), c(&p2), c(&q1), c(&q2)).map(Model::to_similarity)
}

fn least_squares(src: &[Point2], dst: &[Point2], mask: &[bool]) -> Option<Model> {
    let n = mask.iter().filter(|&&b| b).count();
    if n < 2 {
        return None;
    }
    let pick = || {
        src.iter()
            .zip(dst)
            .zip(mask)
            .filter(|(_, m)| **m)
            .map(|((p, q), _)| (c(p), c(q)))
    };
    let (sp, sq) = pick().fold(
        (Complex64::default(), Complex64::default()),
        |(a, b), (p, q)| (a + p, b + q),
    );
    let (pm, qm) = (sp / n as f64, sq / n as f64);
    let (mut num, mut den) = (Complex64::default(), 0.0);
    for (p, q) in pick() {
        let (dp, dq) = (p - pm, q - qm);
        num += dq * dp.conj();
        den += dp.norm_sqr();
    }
    if den < 1e-18 {
        return None;
    }
    let a = num / den;
    Some(Model { a, t: qm - a * pm })
}

/// Least-squares similarity over all correspondences.
pub fn fit_similarity(src: &[Point2], dst: &[Point2]) -> Option<PixelSimilarity> {
    let mask = alloc::vec![true; src.len().min(dst.len())];
    least_squares(src, dst, &mask).map(Model::to_similarity)
}

fn inliers_of(model: &Model, src: &[Point2], dst: &[Point2], threshold: f64) -> Vec<bool> {
    let t2 = threshold * threshold;
    src.iter()
        .zip(dst)
        .map(|(p, q)| (model.apply(c(p)) - c(q)).norm_sqr() <= t2)
        .collect()
}

fn count(mask: &[bool]) -> usize {
    mask.iter().filter(|&&b| b).count()
}

/// RANSAC over 2-point samples, then least-squares refinement on the inliers.
///
/// Returns `Ok(None)` when no model gathers `min_inliers` inliers.
pub fn estimate_similarity_ransac(
    src: &[Point2],
    dst: &[Point2],
    seed: u64,
    cfg: &RansacConfig,
) -> Result<Option<RansacResult>, LoopError> {
    if src.len() != dst.len() {
        return Err(LoopError::CorrespondenceLength(src.len(), dst.len()));
    }
    let n = src.len();
    if n < 2 {
        return Err(LoopError::TooFewCorrespondences(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Model, Vec<bool>, usize)> = None;
    for _ in 0..cfg.iterations {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let Some(model) = minimal(c(&src[i]), c(&src[j]), c(&dst[i]), c(&dst[j])) else {
            continue;
        };
        let mask = inliers_of(&model, src, dst, cfg.inlier_threshold_px);
        let k = count(&mask);
        if best.as_ref().is_none_or(|b| k > b.2) {
            best = Some((model, mask, k));
        }
    }
    let Some((mut model, mut mask, mut k)) = best else {
        return Ok(None);
    };
    if k < cfg.min_inliers.max(2) {
        return Ok(None);
    }
    for _ in 0..10 {
        let Some(refit) = least_squares(src, dst, &mask) else {
            break;
        };
        let refit_mask = inliers_of(&refit, src, dst, cfg.inlier_threshold_px);
        let refit_k = count(&refit_mask);
        if refit_k < k {
            // keep the refit of the previous set
            model = refit;
            break;
        }
        let stable = refit_mask == mask;
        model = refit;
        mask = refit_mask;
        k = refit_k;
        if stable {
            break;
        }
    }
    Ok(Some(RansacResult {
        transform: model.to_similarity(),
        inliers: mask,
    }))
}

//! Intensity-centroid orientation and the steered 256-pair descriptor.

use alloc::vec::Vec;

use super::orb_pattern::ORB_PATTERN;
use super::pyramid::Pyramid;
use super::{Described, Descriptor, Integral, Keypoint};
use crate::image::Gray8;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

/// Radius of the circular patch used for the intensity centroid.
pub const ORIENTATION_RADIUS: usize = 15;

const BOX_HALF: usize = 2;
// pattern radius 13 plus the smoothing box
const DESCRIBE_MARGIN: usize = 15;

/// Angle of the intensity centroid of the disc of `radius` around `(x, y)`.
///
/// The radius shrinks to fit inside the image. A patch with zero first
/// moments (uniform, radially symmetric or empty) has angle 0.
pub fn orientation_centroid(img: &Gray8, x: usize, y: usize, radius: usize) -> f64 {
    let fit = x.min(y).min(img.width - 1 - x).min(img.height - 1 - y);
    let r = radius.min(fit) as i64;
    let (mut m10, mut m01) = (0i64, 0i64);
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy > r * r {
                continue;
            }
            let v = img.get((x as i64 + dx) as usize, (y as i64 + dy) as usize) as i64;
            m10 += dx * v;
            m01 += dy * v;
        }
    }
    if m10 == 0 && m01 == 0 {
        return 0.0;
    }
    (m01 as f64).atan2(m10 as f64)
}

pub(super) fn level_coords(kp: &Keypoint, pyramid: &Pyramid) -> (usize, f64, f64) {
    let level = (kp.octave as usize).min(pyramid.levels.len() - 1);
    let s = pyramid.scale(level);
    let x = ((kp.x as f64 + 0.5) / s - 0.5).round();
    let y = ((kp.y as f64 + 0.5) / s - 0.5).round();
    (level, x, y)
}

pub(super) fn inside(img: &Gray8, x: f64, y: f64, margin: usize) -> bool {
    let m = margin as f64;
    x >= m && y >= m && x + m < img.width as f64 && y + m < img.height as f64
}

/// Sets each keypoint's angle from the intensity centroid on its pyramid level.
/// Keypoints whose patch leaves the image keep the clamped-radius estimate.
pub fn assign_orientation(img: &Gray8, kps: &mut [Keypoint], scale_factor: f64) {
    let levels = kps.iter().map(|k| k.octave as usize + 1).max().unwrap_or(1);
    let pyramid = Pyramid::new(img, levels, scale_factor, 1);
    for kp in kps.iter_mut() {
        let (level, x, y) = level_coords(kp, &pyramid);
        let layer = &pyramid.levels[level];
        if x < 0.0 || y < 0.0 || x >= layer.width as f64 || y >= layer.height as f64 {
            continue;
        }
        kp.angle = orientation_centroid(layer, x as usize, y as usize, ORIENTATION_RADIUS) as f32;
    }
}

/// 256 box-smoothed intensity comparisons on the pattern rotated by each keypoint's angle.
pub fn describe_orb(img: &Gray8, kps: &[Keypoint], scale_factor: f64) -> Described {
    let mut oriented = kps.to_vec();
    assign_orientation(img, &mut oriented, scale_factor);

    let levels = kps.iter().map(|k| k.octave as usize + 1).max().unwrap_or(1);
    let pyramid = Pyramid::new(img, levels, scale_factor, 1);
    let integrals: Vec<Integral> = pyramid.levels.iter().map(Integral::new).collect();

    let mut out = Described {
        keypoints: Vec::with_capacity(kps.len()),
        descriptors: Vec::with_capacity(kps.len()),
        dropped: Vec::new(),
    };
    for (i, kp) in oriented.iter().enumerate() {
        let (level, x, y) = level_coords(kp, &pyramid);
        if !inside(&pyramid.levels[level], x, y, DESCRIBE_MARGIN) {
            out.dropped.push(i);
            continue;
        }
        let ii = &integrals[level];
        let (s, c) = (kp.angle as f64).sin_cos();
        let (cx, cy) = (x as i64, y as i64);
        let at = |px: i8, py: i8| {
            let (px, py) = (px as f64, py as f64);
            let rx = (c * px - s * py).round() as i64;
            let ry = (s * px + c * py).round() as i64;
            ii.box_sum((cx + rx) as usize, (cy + ry) as usize, BOX_HALF)
        };
        let mut d = Descriptor::zeros(256);
        for (bit, p) in ORB_PATTERN.iter().enumerate() {
            d.set(bit, at(p[0], p[1]) < at(p[2], p[3]));
        }
        out.keypoints.push(*kp);
        out.descriptors.push(d);
    }
    out
}

//! Concentric-ring sampling pattern: a centre point and rings of 10, 14, 15
//! and 20 points. Pairs closer than [`SHORT_PAIR_MAX`] give the 512 descriptor
//! bits; pairs farther than [`LONG_PAIR_MIN`] give the local gradient that
//! orients the pattern.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::orb::{inside, level_coords};
use super::pyramid::Pyramid;
use super::{Described, Descriptor, Integral, Keypoint};
use crate::image::Gray8;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

const PATTERN_SCALE: f64 = 0.85;
const RING_RADII: [f64; 5] = [0.0, 2.9, 4.9, 7.4, 10.8];
const RING_POINTS: [usize; 5] = [1, 10, 14, 15, 20];
const CENTRE_SIGMA: f64 = 0.5;
pub const SHORT_PAIR_MAX: f64 = 5.85;
pub const LONG_PAIR_MIN: f64 = 8.2;
const BITS: usize = 512;
// outer ring radius rounded up, plus the largest smoothing box
const DESCRIBE_MARGIN: usize = 13;

struct PatternPoint {
    x: f64,
    y: f64,
    /// Half-size of the smoothing box.
    box_half: usize,
}

struct Pattern {
    points: Vec<PatternPoint>,
    short_pairs: Vec<(usize, usize)>,
    long_pairs: Vec<(usize, usize)>,
    /// Common multiple of all box areas, so smoothed means compare as integers.
    area_lcm: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Pattern {
    fn new() -> Self {
        let mut points = Vec::with_capacity(60);
        for (ring, (&r, &n)) in RING_RADII.iter().zip(RING_POINTS.iter()).enumerate() {
            let radius = PATTERN_SCALE * r;
            // Gaussian width ~ half the spacing of neighbours on the ring
            let sigma = if ring == 0 {
                CENTRE_SIGMA
            } else {
                radius * (PI / n as f64).sin()
            };
            // box of side 2h+1 with the same variance as the Gaussian
            let box_half = ((sigma * 12f64.sqrt() - 1.0) / 2.0).round().max(0.0) as usize;
            let offset = if ring % 2 == 0 { PI / n as f64 } else { 0.0 };
            for k in 0..n {
                let a = 2.0 * PI * k as f64 / n as f64 + offset;
                points.push(PatternPoint {
                    x: radius * a.cos(),
                    y: radius * a.sin(),
                    box_half,
                });
            }
        }
        let mut short_pairs = Vec::new();
        let mut long_pairs = Vec::new();
        for i in 1..points.len() {
            for j in 0..i {
                let d = (points[i].x - points[j].x).hypot(points[i].y - points[j].y);
                if d < SHORT_PAIR_MAX {
                    short_pairs.push((i, j));
                } else if d > LONG_PAIR_MIN {
                    long_pairs.push((i, j));
                }
            }
        }
        short_pairs.truncate(BITS);
        let area_lcm = points
            .iter()
            .map(|p| ((2 * p.box_half + 1) * (2 * p.box_half + 1)) as u64)
            .fold(1, |acc, a| acc / gcd(acc, a) * a);
        Self {
            points,
            short_pairs,
            long_pairs,
            area_lcm,
        }
    }

    /// Smoothed intensity of every pattern point, rotated by `angle`, scaled by `area_lcm`.
    fn sample(&self, ii: &Integral, cx: i64, cy: i64, angle: f64) -> Vec<i64> {
        let (s, c) = angle.sin_cos();
        self.points
            .iter()
            .map(|p| {
                let x = (c * p.x - s * p.y).round() as i64 + cx;
                let y = (s * p.x + c * p.y).round() as i64 + cy;
                let side = (2 * p.box_half + 1) as u64;
                let sum = ii.box_sum(x as usize, y as usize, p.box_half) as u64;
                (sum * (self.area_lcm / (side * side))) as i64
            })
            .collect()
    }

    fn orientation(&self, values: &[i64]) -> f64 {
        let (mut gx, mut gy) = (0.0, 0.0);
        for &(i, j) in &self.long_pairs {
            let (dx, dy) = (
                self.points[j].x - self.points[i].x,
                self.points[j].y - self.points[i].y,
            );
            let w = (values[j] - values[i]) as f64 / (dx * dx + dy * dy);
            gx += w * dx;
            gy += w * dy;
        }
        if gx == 0.0 && gy == 0.0 {
            0.0
        } else {
            gy.atan2(gx)
        }
    }
}

/// Orientation from the long-distance pairs at integer position `(x, y)` of `img`.
pub fn brisk_orientation(img: &Gray8, x: usize, y: usize) -> Option<f64> {
    if !inside(img, x as f64, y as f64, DESCRIBE_MARGIN) {
        return None;
    }
    let pattern = Pattern::new();
    let ii = Integral::new(img);
    Some(pattern.orientation(&pattern.sample(&ii, x as i64, y as i64, 0.0)))
}

/// 512-bit descriptors; each keypoint's angle is replaced by the pattern gradient direction.
pub fn describe_brisk(img: &Gray8, kps: &[Keypoint], scale_factor: f64) -> Described {
    let pattern = Pattern::new();
    let levels = kps.iter().map(|k| k.octave as usize + 1).max().unwrap_or(1);
    let pyramid = Pyramid::new(img, levels, scale_factor, 1);
    let integrals: Vec<Integral> = pyramid.levels.iter().map(Integral::new).collect();

    let mut out = Described {
        keypoints: Vec::with_capacity(kps.len()),
        descriptors: Vec::with_capacity(kps.len()),
        dropped: Vec::new(),
    };
    for (i, kp) in kps.iter().enumerate() {
        let (level, x, y) = level_coords(kp, &pyramid);
        if !inside(&pyramid.levels[level], x, y, DESCRIBE_MARGIN) {
            out.dropped.push(i);
            continue;
        }
        let ii = &integrals[level];
        let (cx, cy) = (x as i64, y as i64);
        let angle = pattern.orientation(&pattern.sample(ii, cx, cy, 0.0)) as f32;
        let values = pattern.sample(ii, cx, cy, angle as f64);
        let mut d = Descriptor::zeros(BITS);
        for (bit, &(a, b)) in pattern.short_pairs.iter().enumerate() {
            d.set(bit, values[a] < values[b]);
        }
        out.keypoints.push(Keypoint { angle, ..*kp });
        out.descriptors.push(d);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_shape() {
        let p = Pattern::new();
        assert_eq!(p.points.len(), 60);
        assert_eq!(p.short_pairs.len(), 512);
        assert!(p.long_pairs.len() > 100);
        let reach = p
            .points
            .iter()
            .map(|q| q.x.abs().max(q.y.abs()).round() as usize + q.box_half)
            .max()
            .unwrap();
        assert!(reach <= DESCRIBE_MARGIN);
    }

    #[test]
    fn offset_invariance() {
        let mut img = Gray8::filled(48, 48, 0);
        for y in 0..48 {
            for x in 0..48 {
                img.set(x, y, ((x * 5 + y * 3 + (x * y) % 7 * 9) % 200) as u8);
            }
        }
        let kp = Keypoint {
            x: 24.0,
            y: 24.0,
            response: 20.0,
            angle: 0.0,
            octave: 0,
        };
        let a = describe_brisk(&img, &[kp], 1.2);
        let brighter = Gray8::new(48, 48, img.pixels.iter().map(|&v| v + 40).collect()).unwrap();
        let b = describe_brisk(&brighter, &[kp], 1.2);
        assert_eq!(a, b);
        assert_eq!(a.descriptors[0].bits(), 512);
        assert!(brisk_orientation(&img, 2, 2).is_none());
    }
}

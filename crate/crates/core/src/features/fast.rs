//! Segment-test corners: a pixel is a corner when at least 9 contiguous
//! pixels of the 16-pixel Bresenham circle of radius 3 are all brighter than
//! the centre plus the threshold, or all darker than the centre minus it.

use alloc::vec;
use alloc::vec::Vec;

use super::pyramid::Pyramid;
use super::{DetectorConfig, FeatureError, Keypoint};
use crate::image::Gray8;

/// Keypoints closer than this to a level's border are not reported.
pub const EDGE_MARGIN: usize = 16;

const ARC: usize = 9;

const CIRCLE: [(i32, i32); 16] = [
    (0, -3),
    (1, -3),
    (2, -2),
    (3, -1),
    (3, 0),
    (3, 1),
    (2, 2),
    (1, 3),
    (0, 3),
    (-1, 3),
    (-2, 2),
    (-3, 1),
    (-3, 0),
    (-3, -1),
    (-2, -2),
    (-1, -3),
];

#[inline]
fn circle_diffs(img: &Gray8, x: usize, y: usize) -> [i16; 16] {
    let c = img.get(x, y) as i16;
    let mut d = [0i16; 16];
    for (slot, (dx, dy)) in d.iter_mut().zip(CIRCLE.iter()) {
        *slot = img.get((x as i32 + dx) as usize, (y as i32 + dy) as usize) as i16 - c;
    }
    d
}

#[inline]
fn best_arc(d: &[i16; 16], sign: i16) -> i16 {
    let mut best = i16::MIN;
    for start in 0..16 {
        let mut m = i16::MAX;
        for k in 0..ARC {
            m = m.min(sign * d[(start + k) % 16]);
            if m <= best {
                break;
            }
        }
        best = best.max(m);
    }
    best
}

/// Largest `t` plus one for which `(x, y)` passes the segment test at
/// threshold `t`: the pixel is a corner at `t` iff the score exceeds `t`.
/// Requires `(x, y)` at least 3 pixels from the border.
pub fn corner_score(img: &Gray8, x: usize, y: usize) -> i16 {
    let d = circle_diffs(img, x, y);
    best_arc(&d, 1).max(best_arc(&d, -1))
}

fn level_corners(img: &Gray8, threshold: u8) -> Vec<(usize, usize, i16)> {
    let (w, h) = (img.width, img.height);
    if w <= 2 * EDGE_MARGIN || h <= 2 * EDGE_MARGIN {
        return Vec::new();
    }
    let t = threshold as i16;
    let mut scores = vec![0i16; w * h];
    for y in EDGE_MARGIN..h - EDGE_MARGIN {
        for x in EDGE_MARGIN..w - EDGE_MARGIN {
            let d = circle_diffs(img, x, y);
            let bright = d.iter().filter(|&&v| v > t).count();
            let dark = d.iter().filter(|&&v| v < -t).count();
            if bright < ARC && dark < ARC {
                continue;
            }
            let s = best_arc(&d, 1).max(best_arc(&d, -1));
            if s > t {
                scores[y * w + x] = s;
            }
        }
    }
    // 3x3 suppression; ties go to the earlier pixel in raster order
    let mut out = Vec::new();
    for y in EDGE_MARGIN..h - EDGE_MARGIN {
        for x in EDGE_MARGIN..w - EDGE_MARGIN {
            let s = scores[y * w + x];
            if s == 0 {
                continue;
            }
            let earlier = [(x - 1, y - 1), (x, y - 1), (x + 1, y - 1), (x - 1, y)];
            let later = [(x + 1, y), (x - 1, y + 1), (x, y + 1), (x + 1, y + 1)];
            if earlier.iter().all(|&(a, b)| s > scores[b * w + a])
                && later.iter().all(|&(a, b)| s >= scores[b * w + a])
            {
                out.push((x, y, s));
            }
        }
    }
    out
}

/// Corners on every pyramid level, strongest first, capped at `target_keypoints`.
pub fn detect_corners(img: &Gray8, cfg: &DetectorConfig) -> Result<Vec<Keypoint>, FeatureError> {
    cfg.validate()?;
    if img.width < 32 || img.height < 32 {
        return Err(FeatureError::ImageTooSmall(img.width, img.height));
    }
    let pyramid = Pyramid::new(img, cfg.n_octaves, cfg.scale_factor, 2 * EDGE_MARGIN + 1);
    let mut kps = Vec::new();
    for (level, layer) in pyramid.levels.iter().enumerate() {
        let s = pyramid.scale(level);
        for (x, y, score) in level_corners(layer, cfg.corner_threshold) {
            kps.push(Keypoint {
                x: ((x as f64 + 0.5) * s - 0.5) as f32,
                y: ((y as f64 + 0.5) * s - 0.5) as f32,
                response: score as f32,
                angle: 0.0,
                octave: level as u32,
            });
        }
    }
    kps.sort_by(|a, b| {
        b.response
            .total_cmp(&a.response)
            .then(a.octave.cmp(&b.octave))
            .then(a.y.total_cmp(&b.y))
            .then(a.x.total_cmp(&b.x))
    });
    kps.truncate(cfg.target_keypoints);
    Ok(kps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_image() -> Gray8 {
        let mut img = Gray8::filled(64, 64, 20);
        for y in 24..40 {
            for x in 24..40 {
                img.set(x, y, 220);
            }
        }
        img
    }

    // exhaustive segment test without arcs-of-minimum shortcuts
    fn oracle_is_corner(img: &Gray8, x: usize, y: usize, t: i16) -> bool {
        let c = img.get(x, y) as i16;
        let ring: Vec<i16> = CIRCLE
            .iter()
            .map(|(dx, dy)| img.get((x as i32 + dx) as usize, (y as i32 + dy) as usize) as i16)
            .collect();
        (0..16).any(|start| {
            (0..9).all(|k| ring[(start + k) % 16] > c + t)
                || (0..9).all(|k| ring[(start + k) % 16] < c - t)
        })
    }

    #[test]
    fn constant_image_has_no_corners() {
        let kps = detect_corners(&Gray8::filled(64, 64, 100), &DetectorConfig::orb()).unwrap();
        assert!(kps.is_empty());
    }

    #[test]
    fn score_agrees_with_exhaustive_test() {
        let img = square_image();
        for t in [1i16, 15, 100, 199, 200] {
            for y in 3..61 {
                for x in 3..61 {
                    assert_eq!(
                        corner_score(&img, x, y) > t,
                        oracle_is_corner(&img, x, y, t),
                        "({x},{y}) t={t}"
                    );
                }
            }
        }
    }

    #[test]
    fn square_corners_are_found() {
        let img = square_image();
        let kps = detect_corners(&img, &DetectorConfig::orb()).unwrap();
        for (cx, cy) in [(24.0, 24.0), (39.0, 24.0), (24.0, 39.0), (39.0, 39.0)] {
            assert!(
                kps.iter()
                    .any(|k| ((k.x - cx).powi(2) + (k.y - cy).powi(2)).sqrt() <= 2.0),
                "no keypoint near ({cx},{cy}): {kps:?}"
            );
        }
        assert!(kps.iter().all(|k| k.response >= 15.0));
    }

    #[test]
    fn threshold_monotonicity() {
        let mut img = Gray8::filled(96, 96, 0);
        for y in 0..96 {
            for x in 0..96 {
                img.set(x, y, ((x * 31 + y * 17 + (x * y) % 13 * 11) % 256) as u8);
            }
        }
        let mut prev = usize::MAX;
        for t in [5u8, 10, 15, 30, 60, 120] {
            let cfg = DetectorConfig {
                corner_threshold: t,
                target_keypoints: usize::MAX,
                ..DetectorConfig::orb()
            };
            let n = detect_corners(&img, &cfg).unwrap().len();
            assert!(n <= prev);
            prev = n;
        }
    }

    #[test]
    fn small_image_rejected() {
        assert_eq!(
            detect_corners(&Gray8::filled(31, 40, 0), &DetectorConfig::orb()),
            Err(FeatureError::ImageTooSmall(31, 40))
        );
    }
}

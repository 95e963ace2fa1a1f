use alloc::vec::Vec;

use crate::image::Gray8;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

pub const DEFAULT_SCALE_FACTOR: f64 = 1.2;

/// Image pyramid; level `l` is the base image shrunk by `scale_factor^l`.
///
/// Each level is resampled bilinearly from the one above with pixel centres
/// aligned, so level-`l` pixel `x` sits at base coordinate `(x + 0.5) s^l - 0.5`.
#[derive(Clone, Debug)]
pub struct Pyramid {
    pub levels: Vec<Gray8>,
    pub scale_factor: f64,
}

impl Pyramid {
    /// Builds up to `n_levels` levels, stopping before a level would be smaller than `min_size`.
    pub fn new(base: &Gray8, n_levels: usize, scale_factor: f64, min_size: usize) -> Self {
        let mut levels = Vec::with_capacity(n_levels);
        levels.push(base.clone());
        while levels.len() < n_levels {
            let prev = levels.last().expect("non-empty");
            let w = (prev.width as f64 / scale_factor).round() as usize;
            let h = (prev.height as f64 / scale_factor).round() as usize;
            if w < min_size || h < min_size {
                break;
            }
            levels.push(downsample(prev, w, h, scale_factor));
        }
        Self {
            levels,
            scale_factor,
        }
    }

    pub fn scale(&self, level: usize) -> f64 {
        self.scale_factor.powi(level as i32)
    }
}

const FRAC_BITS: u32 = 8;
const ONE: u32 = 1 << FRAC_BITS;

// Source index and fixed-point fraction of a destination pixel centre.
fn source_coord(dst: usize, factor: f64, max: usize) -> (usize, usize, u32) {
    let s = ((dst as f64 + 0.5) * factor - 0.5).clamp(0.0, max as f64);
    let i = s.floor() as usize;
    let f = ((s - i as f64) * ONE as f64).round() as u32;
    // a fraction that rounds up to one lands on the next pixel
    if f == ONE {
        ((i + 1).min(max), (i + 2).min(max), 0)
    } else {
        (i, (i + 1).min(max), f)
    }
}

/// Bilinear resampling with integer weights summing to exactly `ONE^2`, so a
/// constant added to every pixel passes through unchanged.
fn downsample(src: &Gray8, w: usize, h: usize, factor: f64) -> Gray8 {
    let mut out = Gray8::filled(w, h, 0);
    let xs: Vec<_> = (0..w)
        .map(|c| source_coord(c, factor, src.width - 1))
        .collect();
    for row in 0..h {
        let (y0, y1, fy) = source_coord(row, factor, src.height - 1);
        for (col, &(x0, x1, fx)) in xs.iter().enumerate() {
            let px = |x: usize, y: usize| src.get(x, y) as u32;
            let top = px(x0, y0) * (ONE - fx) + px(x1, y0) * fx;
            let bottom = px(x0, y1) * (ONE - fx) + px(x1, y1) * fx;
            let v = top * (ONE - fy) + bottom * fy;
            out.set(col, row, ((v + ONE * ONE / 2) >> (2 * FRAC_BITS)) as u8);
        }
    }
    out
}

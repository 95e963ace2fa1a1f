//! Turning the complex SAR accumulator into feature-ready grayscale, plus the
//! cell-wise occupancy difference used to score a map against ground truth.

use alloc::vec;
use alloc::vec::Vec;

use crate::backprojection::SarImage;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ImageError {
    #[error("image sizes differ: {0}x{1} vs {2}x{3}")]
    SizeMismatch(usize, usize, usize, usize),
    #[error("blur sigma must be finite and >= 0, got {0}")]
    InvalidSigma(f64),
    #[error("pixel buffer of {len} values does not match {width}x{height}")]
    BufferSize {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("crop window exceeds the image")]
    CropOutOfBounds,
}

/// Real-valued image.
#[derive(Clone, Debug, PartialEq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub resolution_m: f64,
    pub pixels: Vec<f64>,
}

/// 8-bit image, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gray8 {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(
        width: usize,
        height: usize,
        resolution_m: f64,
        pixels: Vec<f64>,
    ) -> Result<Self, ImageError> {
        if pixels.len() != width * height {
            return Err(ImageError::BufferSize {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            resolution_m,
            pixels,
        })
    }

    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.pixels[row * self.width + col]
    }

    pub fn sum(&self) -> f64 {
        self.pixels.iter().sum()
    }
}

impl Gray8 {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if pixels.len() != width * height {
            return Err(ImageError::BufferSize {
                width,
                height,
                len: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, col: usize, row: usize, v: u8) {
        self.pixels[row * self.width + col] = v;
    }

    pub fn crop(
        &self,
        col: usize,
        row: usize,
        width: usize,
        height: usize,
    ) -> Result<Gray8, ImageError> {
        if col + width > self.width || row + height > self.height {
            return Err(ImageError::CropOutOfBounds);
        }
        let mut pixels = Vec::with_capacity(width * height);
        for r in row..row + height {
            let base = r * self.width + col;
            pixels.extend_from_slice(&self.pixels[base..base + width]);
        }
        Ok(Gray8 {
            width,
            height,
            pixels,
        })
    }

    /// Bilinear sample at continuous coordinates; `None` outside the image.
    pub fn sample_bilinear(&self, x: f64, y: f64) -> Option<f64> {
        if x < 0.0 || y < 0.0 || x > (self.width - 1) as f64 || y > (self.height - 1) as f64 {
            return None;
        }
        let (x0, y0) = (x.floor() as usize, y.floor() as usize);
        let (x1, y1) = ((x0 + 1).min(self.width - 1), (y0 + 1).min(self.height - 1));
        let (fx, fy) = (x - x0 as f64, y - y0 as f64);
        let p = |c, r| self.get(c, r) as f64;
        Some(
            (1.0 - fy) * ((1.0 - fx) * p(x0, y0) + fx * p(x1, y0))
                + fy * ((1.0 - fx) * p(x0, y1) + fx * p(x1, y1)),
        )
    }
}

/// Planar similarity `p' = scale * R(rotation) * p + (tx, ty)` in pixel units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PixelSimilarity {
    pub scale: f64,
    pub rotation_rad: f64,
    pub tx: f64,
    pub ty: f64,
}

impl PixelSimilarity {
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let (s, c) = self.rotation_rad.sin_cos();
        (
            self.scale * (c * x - s * y) + self.tx,
            self.scale * (s * x + c * y) + self.ty,
        )
    }

    pub fn inverse(&self) -> PixelSimilarity {
        let inv_scale = 1.0 / self.scale;
        let (s, c) = (-self.rotation_rad).sin_cos();
        PixelSimilarity {
            scale: inv_scale,
            rotation_rad: -self.rotation_rad,
            tx: -inv_scale * (c * self.tx - s * self.ty),
            ty: -inv_scale * (s * self.tx + c * self.ty),
        }
    }
}

/// Resamples `img` so that output pixel `p` shows input pixel `inverse(transform)(p)`.
/// Pixels mapping outside the input take `fill`.
pub fn warp_similarity(img: &Gray8, transform: &PixelSimilarity, fill: u8) -> Gray8 {
    let inv = transform.inverse();
    let mut out = Gray8::filled(img.width, img.height, fill);
    for row in 0..img.height {
        for col in 0..img.width {
            let (x, y) = inv.apply(col as f64, row as f64);
            if let Some(v) = img.sample_bilinear(x, y) {
                out.set(col, row, (v + 0.5).floor().clamp(0.0, 255.0) as u8);
            }
        }
    }
    out
}

/// `Re(p) + |p|` per pixel: negative real parts are removed, positive ones doubled.
pub fn positive_image(sar: &SarImage) -> GrayImage {
    GrayImage {
        width: sar.grid.width,
        height: sar.grid.height,
        resolution_m: sar.grid.resolution_m,
        pixels: sar.pixels.iter().map(|p| p.re + p.norm()).collect(),
    }
}

/// Half-sample symmetric reflection of an index into `0..n`.
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Normalized Gaussian taps for radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let taps: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / total).collect()
}

/// Separable Gaussian blur with reflected borders. `sigma = 0` returns the input.
pub fn gaussian_blur(img: &GrayImage, sigma_px: f64) -> Result<GrayImage, ImageError> {
    if !(sigma_px >= 0.0) || !sigma_px.is_finite() {
        return Err(ImageError::InvalidSigma(sigma_px));
    }
    if sigma_px == 0.0 {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma_px);
    let radius = (kernel.len() / 2) as isize;
    let (w, h) = (img.width, img.height);
    let mut tmp = vec![0.0; w * h];
    for row in 0..h {
        let line = &img.pixels[row * w..(row + 1) * w];
        for col in 0..w {
            tmp[row * w + col] = kernel
                .iter()
                .enumerate()
                .map(|(k, t)| t * line[reflect(col as isize + k as isize - radius, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; w * h];
    for row in 0..h {
        for col in 0..w {
            out[row * w + col] = kernel
                .iter()
                .enumerate()
                .map(|(k, t)| t * tmp[reflect(row as isize + k as isize - radius, h) * w + col])
                .sum();
        }
    }
    GrayImage::new(w, h, img.resolution_m, out)
}

/// Affine map of `[min, max]` onto `0..=255`, rounding half up.
/// A constant image maps to all zeros.
pub fn quantize(img: &GrayImage) -> Gray8 {
    let lo = img.pixels.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = img.pixels.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let pixels = if !(span > 0.0) || !span.is_finite() {
        vec![0; img.pixels.len()]
    } else {
        img.pixels
            .iter()
            .map(|&v| ((v - lo) / span * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8)
            .collect()
    };
    Gray8 {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Otsu's threshold: levels `<= t` form the background class.
pub fn otsu_threshold(img: &Gray8) -> u8 {
    let mut hist = [0u64; 256];
    for &p in &img.pixels {
        hist[p as usize] += 1;
    }
    let total = img.pixels.len() as f64;
    if total == 0.0 {
        return 0;
    }
    let sum_all: f64 = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let (mut best, mut best_t) = (-1.0, 0u8);
    for (t, &h) in hist.iter().enumerate() {
        w0 += h as f64;
        sum0 += t as f64 * h as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let mean_diff = sum0 / w0 - (sum_all - sum0) / w1;
        let between = w0 * w1 * mean_diff * mean_diff;
        if between > best {
            best = between;
            best_t = t as u8;
        }
    }
    best_t
}

/// Occupancy grid, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryGrid {
    pub width: usize,
    pub height: usize,
    pub cells: Vec<bool>,
}

impl BinaryGrid {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            cells: vec![false; width * height],
        }
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, v: bool) {
        self.cells[row * self.width + col] = v;
    }

    pub fn count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }
}

/// Cells strictly above `level` are occupied.
pub fn threshold(img: &Gray8, level: u8) -> BinaryGrid {
    BinaryGrid {
        width: img.width,
        height: img.height,
        cells: img.pixels.iter().map(|&p| p > level).collect(),
    }
}

/// Fraction of cells on which two occupancy grids disagree.
pub fn cellwise_difference(predicted: &BinaryGrid, truth: &BinaryGrid) -> Result<f64, ImageError> {
    if predicted.width != truth.width || predicted.height != truth.height {
        return Err(ImageError::SizeMismatch(
            predicted.width,
            predicted.height,
            truth.width,
            truth.height,
        ));
    }
    let total = predicted.cells.len();
    if total == 0 {
        return Ok(0.0);
    }
    let differing = predicted
        .cells
        .iter()
        .zip(&truth.cells)
        .filter(|(a, b)| a != b)
        .count();
    Ok(differing as f64 / total as f64)
}

/// Positive image, blur and quantization in one step.
pub fn enhance(sar: &SarImage, sigma_px: f64) -> Result<(GrayImage, Gray8), ImageError> {
    let smooth = gaussian_blur(&positive_image(sar), sigma_px)?;
    let q = quantize(&smooth);
    Ok((smooth, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backprojection::ImageGrid;
    use crate::geometry::Point2;
    use core::f64::consts::PI;
    use num_complex::Complex64;

    fn gray(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> GrayImage {
        let mut px = Vec::new();
        for r in 0..h {
            for c in 0..w {
                px.push(f(c, r));
            }
        }
        GrayImage::new(w, h, 0.005, px).unwrap()
    }

    #[test]
    fn positive_image_examples() {
        let grid = ImageGrid::new(3, 1, 0.005, Point2::default()).unwrap();
        let sar = SarImage {
            grid,
            pixels: vec![
                Complex64::new(-0.5, 0.0),
                Complex64::new(0.7, 0.0),
                Complex64::new(3.0, 4.0),
            ],
            scan_count: 1,
        };
        let p = positive_image(&sar);
        assert_eq!(p.pixels[0], 0.0);
        assert!((p.pixels[1] - 1.4).abs() < 1e-15);
        assert_eq!(p.pixels[2], 8.0);
    }

    #[test]
    fn blur_identity_and_constant() {
        let img = gray(20, 15, |c, r| (c * 7 + r * 3) as f64 % 11.0);
        assert_eq!(gaussian_blur(&img, 0.0).unwrap(), img);
        let flat = gray(20, 15, |_, _| 4.25);
        let b = gaussian_blur(&flat, 1.7).unwrap();
        assert!(b.pixels.iter().all(|v| (v - 4.25).abs() < 1e-12));
        assert!(matches!(
            gaussian_blur(&img, -1.0),
            Err(ImageError::InvalidSigma(_))
        ));
    }

    #[test]
    fn blur_impulse_center_value() {
        let img = gray(21, 21, |c, r| if c == 10 && r == 10 { 1.0 } else { 0.0 });
        let b = gaussian_blur(&img, 1.0).unwrap();
        // oracle: square of the normalized 1-D centre tap
        let norm: f64 = (-3i32..=3).map(|i| (-(i * i) as f64 / 2.0).exp()).sum();
        let oracle = 1.0 / (norm * norm);
        assert!((b.get(10, 10) - oracle).abs() < 1e-15);
        let continuous = 1.0 / (2.0 * PI);
        assert!((b.get(10, 10) - continuous).abs() / continuous < 0.02);
    }

    #[test]
    fn blur_preserves_mass_with_tiny_image() {
        // kernel wider than the image exercises repeated reflection
        let img = gray(3, 2, |c, r| (c + 2 * r) as f64);
        let b = gaussian_blur(&img, 2.5).unwrap();
        assert!((b.sum() - img.sum()).abs() < 1e-12 * img.sum());
    }

    #[test]
    fn quantize_examples() {
        let img = gray(3, 1, |c, _| [2.0, 4.0, 6.0][c]);
        let q = quantize(&img);
        assert_eq!(q.pixels, vec![0, 128, 255]);
        let flat = gray(4, 4, |_, _| 9.0);
        assert!(quantize(&flat).pixels.iter().all(|&p| p == 0));
    }

    #[test]
    fn otsu_splits_bimodal() {
        let mut px = vec![10u8; 500];
        px.extend(vec![200u8; 500]);
        let img = Gray8::new(100, 10, px).unwrap();
        let t = otsu_threshold(&img);
        assert!((10..200).contains(&t));
        assert_eq!(threshold(&img, t).count(), 500);
    }

    #[test]
    fn cellwise_examples() {
        let mut a = BinaryGrid::new(4, 3);
        a.set(1, 1, true);
        assert_eq!(cellwise_difference(&a, &a).unwrap(), 0.0);
        let comp = BinaryGrid {
            width: 4,
            height: 3,
            cells: a.cells.iter().map(|c| !c).collect(),
        };
        assert_eq!(cellwise_difference(&a, &comp).unwrap(), 1.0);
        assert!(matches!(
            cellwise_difference(&a, &BinaryGrid::new(3, 4)),
            Err(ImageError::SizeMismatch(..))
        ));
        // 1397 differing cells out of 16800
        let mut p = BinaryGrid::new(168, 100);
        for i in 0..1397 {
            p.cells[i] = true;
        }
        let d = cellwise_difference(&p, &BinaryGrid::new(168, 100)).unwrap();
        assert!((d - 0.0832).abs() < 1e-4);
    }

    #[test]
    fn similarity_inverse_round_trips() {
        let t = PixelSimilarity {
            scale: 1.1,
            rotation_rad: 0.3,
            tx: 5.0,
            ty: -2.0,
        };
        let (x, y) = t.apply(3.0, 4.0);
        let (u, v) = t.inverse().apply(x, y);
        assert!((u - 3.0).abs() < 1e-12 && (v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn warp_translation_moves_content() {
        let mut img = Gray8::filled(40, 40, 0);
        img.set(10, 12, 200);
        let t = PixelSimilarity {
            scale: 1.0,
            rotation_rad: 0.0,
            tx: 5.0,
            ty: -3.0,
        };
        let w = warp_similarity(&img, &t, 0);
        assert_eq!(w.get(15, 9), 200);
        assert_eq!(w.get(10, 12), 0);
    }

    #[test]
    fn crop_bounds() {
        let img = Gray8::new(4, 4, (0..16).collect()).unwrap();
        let c = img.crop(1, 2, 2, 2).unwrap();
        assert_eq!(c.pixels, vec![9, 10, 13, 14]);
        assert_eq!(img.crop(3, 3, 2, 1), Err(ImageError::CropOutOfBounds));
    }
}

//! Back-projection of compressed scans onto a complex pixel grid.
//!
//! Each scan contributes only to pixels inside its field of view: an annular
//! sector around the boresight bounded by the radar's minimum and maximum
//! range. The sector is rasterized as a polygon (arcs replaced by chords of
//! at most [`FOV_CHORD_STEP_DEG`]) with an even-odd scanline fill, yielding
//! per-row spans. A pixel inside the sector takes the compressed sample of
//! the nearest range bin; the final image is the plain sum over scans.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::geometry::{normalize_angle, Point2, Pose2};
use crate::radar::{range_bin_spacing, CompressedScan, RadarConfig};
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

/// Angular step of the chords approximating the field-of-view arcs.
pub const FOV_CHORD_STEP_DEG: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SarError {
    #[error("invalid image grid: {0}")]
    InvalidGrid(&'static str),
    #[error("image grids differ")]
    GridMismatch,
    #[error("no scans to back-project")]
    EmptyInput,
    #[error("scan pose is not finite")]
    NonFinitePose,
}

/// Pixel lattice: pixel `(col, row)` is centred at
/// `origin + (col * resolution, row * resolution)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ImageGrid {
    pub width: usize,
    pub height: usize,
    pub resolution_m: f64,
    pub origin: Point2,
}

impl ImageGrid {
    pub fn new(
        width: usize,
        height: usize,
        resolution_m: f64,
        origin: Point2,
    ) -> Result<Self, SarError> {
        let grid = Self {
            width,
            height,
            resolution_m,
            origin,
        };
        grid.validate()?;
        Ok(grid)
    }

    /// Smallest grid covering the bounding box of `positions` padded by `padding_m`.
    pub fn covering<I>(positions: I, padding_m: f64, resolution_m: f64) -> Result<Self, SarError>
    where
        I: IntoIterator<Item = Point2>,
    {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in positions {
            if !p.is_finite() {
                return Err(SarError::NonFinitePose);
            }
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        if !lo.x.is_finite() {
            return Err(SarError::EmptyInput);
        }
        if !(resolution_m > 0.0) || !(padding_m >= 0.0) {
            return Err(SarError::InvalidGrid(
                "resolution must be positive and padding non-negative",
            ));
        }
        let origin = Point2::new(lo.x - padding_m, lo.y - padding_m);
        let width = ((hi.x - lo.x + 2.0 * padding_m) / resolution_m).ceil() as usize + 1;
        let height = ((hi.y - lo.y + 2.0 * padding_m) / resolution_m).ceil() as usize + 1;
        Self::new(width, height, resolution_m, origin)
    }

    pub fn validate(&self) -> Result<(), SarError> {
        if !(self.resolution_m > 0.0) || !self.resolution_m.is_finite() {
            return Err(SarError::InvalidGrid("resolution must be positive"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(SarError::InvalidGrid("width and height must be at least 1"));
        }
        if !self.origin.is_finite() {
            return Err(SarError::InvalidGrid("origin must be finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, col: usize, row: usize) -> usize {
        row * self.width + col
    }

    pub fn pixel_center(&self, col: usize, row: usize) -> Point2 {
        Point2::new(
            self.origin.x + col as f64 * self.resolution_m,
            self.origin.y + row as f64 * self.resolution_m,
        )
    }

    /// Continuous pixel coordinates of a world point.
    pub fn to_pixel(&self, p: Point2) -> Point2 {
        Point2::new(
            (p.x - self.origin.x) / self.resolution_m,
            (p.y - self.origin.y) / self.resolution_m,
        )
    }

    /// Nearest pixel of a world point, if it lies on the grid.
    pub fn pixel_of(&self, p: Point2) -> Option<(usize, usize)> {
        let q = self.to_pixel(p);
        let (c, r) = (q.x.round(), q.y.round());
        (c >= 0.0 && r >= 0.0 && (c as usize) < self.width && (r as usize) < self.height)
            .then_some((c as usize, r as usize))
    }
}

/// Euclidean distance between a pixel centre and the radar.
pub fn pixel_range(pixel_center: Point2, radar: &Pose2) -> f64 {
    pixel_center.distance(&radar.position())
}

/// Direct range/bearing test for the field of view.
pub fn in_fov(point: Point2, radar: &Pose2, config: &RadarConfig) -> bool {
    let r = pixel_range(point, radar);
    if r < config.range_min_m || r > config.range_max_m {
        return false;
    }
    let bearing = (point.y - radar.y).atan2(point.x - radar.x);
    let off = normalize_angle(bearing - radar.theta - config.mount_angle_rad);
    off.abs() <= config.beamwidth_rad / 2.0
}

/// Vertices (world frame) of the chord-approximated field-of-view sector.
pub fn fov_polygon(radar: &Pose2, config: &RadarConfig) -> Vec<Point2> {
    let boresight = radar.theta + config.mount_angle_rad;
    let half = config.beamwidth_rad / 2.0;
    let steps = (config.beamwidth_rad / FOV_CHORD_STEP_DEG.to_radians())
        .ceil()
        .max(1.0) as usize;
    let angle = |i: usize| boresight - half + config.beamwidth_rad * i as f64 / steps as f64;
    let at = |r: f64, a: f64| Point2::new(radar.x + r * a.cos(), radar.y + r * a.sin());
    let mut poly = Vec::with_capacity(2 * steps + 2);
    poly.extend((0..=steps).map(|i| at(config.range_max_m, angle(i))));
    poly.extend((0..=steps).rev().map(|i| at(config.range_min_m, angle(i))));
    poly
}

/// Contiguous run of pixels `col_start..col_end` on one row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    pub row: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl Span {
    pub fn len(&self) -> usize {
        self.col_end - self.col_start
    }

    pub fn is_empty(&self) -> bool {
        self.col_end == self.col_start
    }
}

/// Pixels whose centres fall inside a polygon, as sorted row spans.
#[derive(Clone, Debug, PartialEq)]
pub struct FovMask {
    pub grid: ImageGrid,
    pub spans: Vec<Span>,
}

impl FovMask {
    pub fn count(&self) -> usize {
        self.spans.iter().map(Span::len).sum()
    }

    pub fn contains(&self, col: usize, row: usize) -> bool {
        self.spans
            .iter()
            .any(|s| s.row == row && col >= s.col_start && col < s.col_end)
    }

    pub fn to_dense(&self) -> Vec<bool> {
        let mut out = vec![false; self.grid.len()];
        for s in &self.spans {
            let base = self.grid.index(0, s.row);
            out[base + s.col_start..base + s.col_end].fill(true);
        }
        out
    }
}

/// Even-odd scanline fill of a world-frame polygon, sampled at pixel centres.
pub fn rasterize_polygon(polygon: &[Point2], grid: &ImageGrid) -> FovMask {
    let pts: Vec<Point2> = polygon.iter().map(|p| grid.to_pixel(*p)).collect();
    let mut spans = Vec::new();
    if pts.len() < 3 {
        return FovMask { grid: *grid, spans };
    }
    let ymin = pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min);
    let ymax = pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
    let row_lo = ymin.ceil().max(0.0) as usize;
    if ymax < 0.0 {
        return FovMask { grid: *grid, spans };
    }
    let row_hi = (ymax.floor() as usize).min(grid.height - 1);
    let mut xs: Vec<f64> = Vec::new();
    for row in row_lo..=row_hi {
        let y = row as f64;
        xs.clear();
        for i in 0..pts.len() {
            let p = pts[i];
            let q = pts[(i + 1) % pts.len()];
            if (p.y <= y && y < q.y) || (q.y <= y && y < p.y) {
                xs.push(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
            }
        }
        xs.sort_by(|a, b| a.total_cmp(b));
        for pair in xs.chunks_exact(2) {
            let start = pair[0].ceil().max(0.0);
            let end = (pair[1].floor() + 1.0).min(grid.width as f64);
            if end > start {
                spans.push(Span {
                    row,
                    col_start: start as usize,
                    col_end: end as usize,
                });
            }
        }
    }
    FovMask { grid: *grid, spans }
}

/// Field-of-view mask of one radar pose.
pub fn fov_mask(radar: &Pose2, config: &RadarConfig, grid: &ImageGrid) -> FovMask {
    rasterize_polygon(&fov_polygon(radar, config), grid)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BackprojectOptions {
    /// Multiply each sample by `R^2` to undo two-way spreading loss.
    pub range_weighting: bool,
}

/// Contribution `S_i` of one scan: values on the masked spans, zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialImage {
    pub grid: ImageGrid,
    pub spans: Vec<Span>,
    /// Concatenated span values in span order.
    pub values: Vec<Complex64>,
}

impl PartialImage {
    pub fn get(&self, col: usize, row: usize) -> Complex64 {
        let mut offset = 0;
        for s in &self.spans {
            if s.row == row && col >= s.col_start && col < s.col_end {
                return self.values[offset + col - s.col_start];
            }
            offset += s.len();
        }
        Complex64::new(0.0, 0.0)
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        self.add_into(&mut out);
        out
    }

    fn add_into(&self, pixels: &mut [Complex64]) {
        let mut offset = 0;
        for s in &self.spans {
            let base = self.grid.index(s.col_start, s.row);
            for (dst, v) in pixels[base..base + s.len()]
                .iter_mut()
                .zip(&self.values[offset..offset + s.len()])
            {
                *dst += *v;
            }
            offset += s.len();
        }
    }
}

#[inline]
fn sample_at(
    scan: &CompressedScan,
    range: f64,
    bin_spacing: f64,
    options: &BackprojectOptions,
) -> Complex64 {
    let bin = (range / bin_spacing).round() as usize;
    match scan.bins.get(bin) {
        Some(v) if options.range_weighting => *v * (range * range),
        Some(v) => *v,
        None => Complex64::new(0.0, 0.0),
    }
}

/// Back-projects one compressed scan. Bins past the end of the scan contribute zero.
pub fn backproject_scan(
    scan: &CompressedScan,
    config: &RadarConfig,
    grid: &ImageGrid,
    options: &BackprojectOptions,
) -> Result<PartialImage, SarError> {
    if !scan.pose.is_finite() {
        return Err(SarError::NonFinitePose);
    }
    let mask = fov_mask(&scan.pose, config, grid);
    let dd = range_bin_spacing(config);
    let radar = scan.pose.position();
    let mut values = Vec::with_capacity(mask.count());
    for s in &mask.spans {
        for col in s.col_start..s.col_end {
            let r = grid.pixel_center(col, s.row).distance(&radar);
            values.push(sample_at(scan, r, dd, options));
        }
    }
    Ok(PartialImage {
        grid: *grid,
        spans: mask.spans,
        values,
    })
}

/// Complex SAR image: the running sum of back-projected scans.
#[derive(Clone, Debug, PartialEq)]
pub struct SarImage {
    pub grid: ImageGrid,
    pub pixels: Vec<Complex64>,
    pub scan_count: usize,
}

impl SarImage {
    pub fn zeros(grid: ImageGrid) -> Self {
        Self {
            grid,
            pixels: vec![Complex64::new(0.0, 0.0); grid.len()],
            scan_count: 0,
        }
    }

    pub fn get(&self, col: usize, row: usize) -> Complex64 {
        self.pixels[self.grid.index(col, row)]
    }

    pub fn add_partial(&mut self, partial: &PartialImage) -> Result<(), SarError> {
        if partial.grid != self.grid {
            return Err(SarError::GridMismatch);
        }
        partial.add_into(&mut self.pixels);
        self.scan_count += 1;
        Ok(())
    }
}

/// Sums partial images in order.
pub fn accumulate<'a, I>(partials: I) -> Result<SarImage, SarError>
where
    I: IntoIterator<Item = &'a PartialImage>,
{
    let mut iter = partials.into_iter();
    let first = iter.next().ok_or(SarError::EmptyInput)?;
    let mut image = SarImage::zeros(first.grid);
    image.add_partial(first)?;
    for p in iter {
        image.add_partial(p)?;
    }
    Ok(image)
}

/// Streaming accumulator; scans from radars with different mounts may be mixed.
#[derive(Clone, Debug)]
pub struct SarAccumulator {
    image: SarImage,
    options: BackprojectOptions,
}

impl SarAccumulator {
    pub fn new(grid: ImageGrid, options: BackprojectOptions) -> Result<Self, SarError> {
        grid.validate()?;
        Ok(Self {
            image: SarImage::zeros(grid),
            options,
        })
    }

    /// Adds one scan without materialising its partial image.
    pub fn add_scan(
        &mut self,
        scan: &CompressedScan,
        config: &RadarConfig,
    ) -> Result<(), SarError> {
        if !scan.pose.is_finite() {
            return Err(SarError::NonFinitePose);
        }
        let grid = self.image.grid;
        let mask = fov_mask(&scan.pose, config, &grid);
        let dd = range_bin_spacing(config);
        let radar = scan.pose.position();
        for s in &mask.spans {
            for col in s.col_start..s.col_end {
                let r = grid.pixel_center(col, s.row).distance(&radar);
                self.image.pixels[grid.index(col, s.row)] += sample_at(scan, r, dd, &self.options);
            }
        }
        self.image.scan_count += 1;
        Ok(())
    }

    pub fn scan_count(&self) -> usize {
        self.image.scan_count
    }

    pub fn finish(self) -> Result<SarImage, SarError> {
        if self.image.scan_count == 0 {
            return Err(SarError::EmptyInput);
        }
        Ok(self.image)
    }
}

/// Back-projects and sums all scans of one radar.
pub fn build_sar<'a, I>(
    scans: I,
    config: &RadarConfig,
    grid: &ImageGrid,
    options: &BackprojectOptions,
) -> Result<SarImage, SarError>
where
    I: IntoIterator<Item = &'a CompressedScan>,
{
    let mut acc = SarAccumulator::new(*grid, *options)?;
    for scan in scans {
        acc.add_scan(scan, config)?;
    }
    acc.finish()
}

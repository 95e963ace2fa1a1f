//! Keypoints and binary descriptors on 8-bit SAR images.
//!
//! Both native detectors share the segment-test corner detector run over an
//! image pyramid. They differ in orientation and description:
//!
//! * [`DetectorId::ORB`]: intensity-centroid orientation and 256 steered
//!   point-pair comparisons on a 5x5 box-smoothed image.
//! * [`DetectorId::BRISK`]: orientation from the long-distance pairs of a
//!   60-point concentric pattern and 512 short-distance comparisons.
//!
//! Other detectors plug in through [`FeatureDetector`] and take part in
//! matching and loop validation as long as they emit binary descriptors.

mod brisk;
mod fast;
mod orb;
mod orb_pattern;
mod pyramid;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use brisk::{brisk_orientation, describe_brisk};
pub use fast::{corner_score, detect_corners, EDGE_MARGIN};
pub use orb::{describe_orb, orientation_centroid, ORIENTATION_RADIUS};
pub use pyramid::{Pyramid, DEFAULT_SCALE_FACTOR};

use crate::image::Gray8;

/// Identifies the algorithm that produced a descriptor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetectorId(pub u8);

impl DetectorId {
    pub const ORB: DetectorId = DetectorId(1);
    pub const BRISK: DetectorId = DetectorId(2);

    pub fn name(&self) -> String {
        match *self {
            DetectorId::ORB => String::from("orb"),
            DetectorId::BRISK => String::from("brisk"),
            DetectorId(n) => alloc::format!("ext{n}"),
        }
    }

    pub fn parse(name: &str) -> Option<DetectorId> {
        match name {
            "orb" => Some(DetectorId::ORB),
            "brisk" => Some(DetectorId::BRISK),
            _ => name.strip_prefix("ext")?.parse().ok().map(DetectorId),
        }
    }

    /// Descriptor length of the native detectors.
    pub fn native_bits(&self) -> Option<usize> {
        match *self {
            DetectorId::ORB => Some(256),
            DetectorId::BRISK => Some(512),
            _ => None,
        }
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("image {0}x{1} is smaller than the 32x32 minimum")]
    ImageTooSmall(usize, usize),
    #[error("invalid detector configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("detector {0} has no native implementation")]
    UnknownDetector(DetectorId),
    #[error("descriptor length {got} does not match {expected} bits")]
    DescriptorLength { expected: usize, got: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Keypoint {
    /// Position in level-0 pixel coordinates.
    pub x: f32,
    pub y: f32,
    pub response: f32,
    pub angle: f32,
    /// Pyramid level the keypoint was found on.
    pub octave: u32,
}

/// Fixed-length bit string, least-significant bit of byte 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Descriptor {
    pub bytes: Vec<u8>,
}

impl Descriptor {
    pub fn zeros(bits: usize) -> Self {
        Self {
            bytes: alloc::vec![0; bits.div_ceil(8)],
        }
    }

    pub fn bits(&self) -> usize {
        self.bytes.len() * 8
    }

    pub fn set(&mut self, bit: usize, value: bool) {
        if value {
            self.bytes[bit / 8] |= 1 << (bit % 8);
        } else {
            self.bytes[bit / 8] &= !(1 << (bit % 8));
        }
    }

    pub fn get(&self, bit: usize) -> bool {
        self.bytes[bit / 8] >> (bit % 8) & 1 == 1
    }

    pub fn hamming(&self, other: &Descriptor) -> u32 {
        self.bytes
            .iter()
            .zip(&other.bytes)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorConfig {
    pub detector: DetectorId,
    /// Segment-test intensity delta.
    pub corner_threshold: u8,
    pub n_octaves: usize,
    pub scale_factor: f64,
    /// Keep at most this many keypoints, strongest first.
    pub target_keypoints: usize,
}

impl DetectorConfig {
    pub fn orb() -> Self {
        Self {
            detector: DetectorId::ORB,
            corner_threshold: 15,
            n_octaves: 4,
            scale_factor: DEFAULT_SCALE_FACTOR,
            target_keypoints: 200,
        }
    }

    pub fn brisk() -> Self {
        Self {
            detector: DetectorId::BRISK,
            ..Self::orb()
        }
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.corner_threshold == 0 {
            return Err(FeatureError::InvalidConfig("corner_threshold must be > 0"));
        }
        if self.target_keypoints == 0 {
            return Err(FeatureError::InvalidConfig("target_keypoints must be >= 1"));
        }
        if self.n_octaves == 0 {
            return Err(FeatureError::InvalidConfig("n_octaves must be >= 1"));
        }
        if !(self.scale_factor > 1.0) || !self.scale_factor.is_finite() {
            return Err(FeatureError::InvalidConfig("scale_factor must be > 1"));
        }
        Ok(())
    }
}

/// Keypoints with one descriptor each, all from the same detector.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSet {
    pub detector: DetectorId,
    pub descriptor_bits: usize,
    pub keypoints: Vec<Keypoint>,
    pub descriptors: Vec<Descriptor>,
}

impl FeatureSet {
    pub fn len(&self) -> usize {
        self.keypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keypoints.is_empty()
    }
}

/// Descriptors for the keypoints that could be described, and the indices
/// of those dropped for lying too close to the border.
#[derive(Clone, Debug, PartialEq)]
pub struct Described {
    pub keypoints: Vec<Keypoint>,
    pub descriptors: Vec<Descriptor>,
    pub dropped: Vec<usize>,
}

/// A keypoint detector and binary descriptor usable in the matching pipeline.
pub trait FeatureDetector {
    fn id(&self) -> DetectorId;
    fn detect_and_describe(&self, img: &Gray8) -> Result<FeatureSet, FeatureError>;
}

impl FeatureDetector for DetectorConfig {
    fn id(&self) -> DetectorId {
        self.detector
    }

    fn detect_and_describe(&self, img: &Gray8) -> Result<FeatureSet, FeatureError> {
        detect_and_describe(img, self)
    }
}

/// Detection, orientation and description with one of the native detectors.
pub fn detect_and_describe(img: &Gray8, cfg: &DetectorConfig) -> Result<FeatureSet, FeatureError> {
    let bits = cfg
        .detector
        .native_bits()
        .ok_or(FeatureError::UnknownDetector(cfg.detector))?;
    let kps = detect_corners(img, cfg)?;
    let described = match cfg.detector {
        DetectorId::ORB => describe_orb(img, &kps, cfg.scale_factor),
        _ => describe_brisk(img, &kps, cfg.scale_factor),
    };
    Ok(FeatureSet {
        detector: cfg.detector,
        descriptor_bits: bits,
        keypoints: described.keypoints,
        descriptors: described.descriptors,
    })
}

/// Integral image with one row and column of zero padding.
pub(crate) struct Integral {
    width: usize,
    sums: Vec<u32>,
}

impl Integral {
    pub(crate) fn new(img: &Gray8) -> Self {
        let w = img.width + 1;
        let mut sums = alloc::vec![0u32; w * (img.height + 1)];
        for r in 0..img.height {
            let mut row_sum = 0u32;
            for c in 0..img.width {
                row_sum += img.get(c, r) as u32;
                sums[(r + 1) * w + c + 1] = sums[r * w + c + 1] + row_sum;
            }
        }
        Self { width: w, sums }
    }

    /// Sum over the square of half-size `h` centred on `(x, y)`; caller guarantees bounds.
    pub(crate) fn box_sum(&self, x: usize, y: usize, h: usize) -> u32 {
        let (x0, y0, x1, y1) = (x - h, y - h, x + h + 1, y + h + 1);
        let w = self.width;
        self.sums[y1 * w + x1] + self.sums[y0 * w + x0]
            - self.sums[y0 * w + x1]
            - self.sums[y1 * w + x0]
    }
}

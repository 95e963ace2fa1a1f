//! Versioned binary feature-set files.
//!
//! ```text
//! magic            b"UWBF"
//! version          u16
//! detector_id      u8
//! count            u32
//! descriptor_bits  u32
//! count x (x f32, y f32, response f32, angle f32, octave i32)
//! count x descriptor_bits/8 packed descriptor bytes
//! ```
//!
//! All integers and floats are little-endian.

use std::fs;
use std::path::Path;

use uwbsar_core::features::{Descriptor, DetectorId, FeatureSet, Keypoint};

use crate::{io_at, Error, Result};

pub const MAGIC: [u8; 4] = *b"UWBF";
pub const VERSION: u16 = 1;
const HEADER_BYTES: usize = 4 + 2 + 1 + 4 + 4;
const KEYPOINT_BYTES: usize = 20;

pub fn encode_features(set: &FeatureSet) -> Result<Vec<u8>> {
    if set.keypoints.len() != set.descriptors.len() {
        return Err(Error::Invalid(format!(
            "{} keypoints but {} descriptors",
            set.keypoints.len(),
            set.descriptors.len()
        )));
    }
    if !set.descriptor_bits.is_multiple_of(8) {
        return Err(Error::Invalid(format!(
            "descriptor length {} is not a whole number of bytes",
            set.descriptor_bits
        )));
    }
    let n = set.keypoints.len();
    let bytes_per = set.descriptor_bits / 8;
    let mut out = Vec::with_capacity(HEADER_BYTES + n * (KEYPOINT_BYTES + bytes_per));
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(set.detector.0);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(set.descriptor_bits as u32).to_le_bytes());
    for k in &set.keypoints {
        for v in [k.x, k.y, k.response, k.angle] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&(k.octave as i32).to_le_bytes());
    }
    for (i, d) in set.descriptors.iter().enumerate() {
        if d.bytes.len() != bytes_per {
            return Err(Error::Record {
                index: i,
                message: format!(
                    "descriptor has {} bytes, expected {bytes_per}",
                    d.bytes.len()
                ),
            });
        }
        out.extend_from_slice(&d.bytes);
    }
    Ok(out)
}

pub fn decode_features(bytes: &[u8]) -> Result<FeatureSet> {
    if bytes.len() < HEADER_BYTES || bytes[..4] != MAGIC {
        return Err(Error::Header("not a feature-set file".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(Error::Header(format!(
            "unsupported feature-set version {version}"
        )));
    }
    let detector = DetectorId(bytes[6]);
    let n = u32_at(7) as usize;
    let bits = u32_at(11) as usize;
    if bits == 0 || !bits.is_multiple_of(8) {
        return Err(Error::Header(format!(
            "descriptor length {bits} is not a positive multiple of 8"
        )));
    }
    let bytes_per = bits / 8;
    let expected = n
        .checked_mul(KEYPOINT_BYTES + bytes_per)
        .and_then(|b| b.checked_add(HEADER_BYTES))
        .ok_or_else(|| Error::Header("count overflows".into()))?;
    if bytes.len() != expected {
        return Err(Error::Header(format!(
            "file has {} bytes, header implies {expected}",
            bytes.len()
        )));
    }
    let mut keypoints = Vec::with_capacity(n);
    for i in 0..n {
        let o = HEADER_BYTES + i * KEYPOINT_BYTES;
        let f = |k: usize| f32::from_bits(u32_at(o + 4 * k));
        let octave = u32_at(o + 16) as i32;
        if octave < 0 {
            return Err(Error::Record {
                index: i,
                message: format!("negative octave {octave}"),
            });
        }
        keypoints.push(Keypoint {
            x: f(0),
            y: f(1),
            response: f(2),
            angle: f(3),
            octave: octave as u32,
        });
    }
    let base = HEADER_BYTES + n * KEYPOINT_BYTES;
    let descriptors = bytes[base..]
        .chunks_exact(bytes_per)
        .map(|c| Descriptor { bytes: c.to_vec() })
        .collect();
    Ok(FeatureSet {
        detector,
        descriptor_bits: bits,
        keypoints,
        descriptors,
    })
}

pub fn save_features(set: &FeatureSet, path: &Path) -> Result<()> {
    fs::write(path, encode_features(set)?).map_err(io_at(path))
}

pub fn load_features(path: &Path) -> Result<FeatureSet> {
    decode_features(&fs::read(path).map_err(io_at(path))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FeatureSet {
        let mut d = Descriptor::zeros(256);
        d.set(3, true);
        d.set(255, true);
        FeatureSet {
            detector: DetectorId::ORB,
            descriptor_bits: 256,
            keypoints: vec![
                Keypoint {
                    x: 10.5,
                    y: 20.25,
                    response: 40.0,
                    angle: -1.25,
                    octave: 2,
                },
                Keypoint {
                    x: 1.0,
                    y: 2.0,
                    response: 16.0,
                    angle: 0.0,
                    octave: 0,
                },
            ],
            descriptors: vec![d, Descriptor::zeros(256)],
        }
    }

    #[test]
    fn round_trip() {
        let set = sample();
        let bytes = encode_features(&set).unwrap();
        assert_eq!(&bytes[..4], b"UWBF");
        assert_eq!(bytes.len(), 15 + 2 * (20 + 32));
        assert_eq!(decode_features(&bytes).unwrap(), set);
    }

    #[test]
    fn truncated_file_rejected() {
        let bytes = encode_features(&sample()).unwrap();
        assert!(matches!(
            decode_features(&bytes[..bytes.len() - 1]),
            Err(Error::Header(_))
        ));
        assert!(matches!(decode_features(b"nope"), Err(Error::Header(_))));
    }
}

//! Binary PGM (P5) for 8-bit images and the raw float dump for analysis.
//!
//! The float dump starts with one ASCII line `width height resolution_m`
//! followed by row-major little-endian `f32` pixels. Complex images add a
//! fourth token `complex` and store interleaved real and imaginary parts.

use std::fs;
use std::io::Write;
use std::path::Path;

use uwbsar_core::backprojection::{ImageGrid, SarImage};
use uwbsar_core::geometry::Point2;
use uwbsar_core::image::{Gray8, GrayImage};
use uwbsar_core::Complex64;

use crate::{io_at, Error, Result};

pub fn encode_pgm(img: &Gray8) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Gray8> {
    let bad = |m: &str| Error::Invalid(format!("PGM: {m}"));
    // magic, width, height, maxval, each separated by whitespace; comments allowed
    let mut tokens = Vec::new();
    let mut i = 0;
    while tokens.len() < 4 {
        while i < bytes.len() && (bytes[i].is_ascii_whitespace() || bytes[i] == b'#') {
            if bytes[i] == b'#' {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else {
                i += 1;
            }
        }
        let start = i;
        while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if start == i {
            return Err(bad("truncated header"));
        }
        tokens.push(std::str::from_utf8(&bytes[start..i]).map_err(|_| bad("header is not ASCII"))?);
    }
    if tokens[0] != "P5" {
        return Err(bad("only binary P5 is supported"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad number in header"));
    let (w, h, maxval) = (num(tokens[1])?, num(tokens[2])?, num(tokens[3])?);
    if maxval != 255 {
        return Err(bad("maxval must be 255"));
    }
    // exactly one whitespace byte before the raster
    let data = bytes.get(i + 1..).ok_or_else(|| bad("missing raster"))?;
    if data.len() != w * h {
        return Err(bad(&format!(
            "raster has {} bytes, expected {}",
            data.len(),
            w * h
        )));
    }
    Ok(Gray8::new(w, h, data.to_vec())?)
}

pub fn save_pgm(img: &Gray8, path: &Path) -> Result<()> {
    fs::write(path, encode_pgm(img)).map_err(io_at(path))
}

pub fn load_pgm(path: &Path) -> Result<Gray8> {
    decode_pgm(&fs::read(path).map_err(io_at(path))?)
}

/// Contents of a float dump.
#[derive(Clone, Debug, PartialEq)]
pub enum FloatImage {
    Real(GrayImage),
    Complex {
        width: usize,
        height: usize,
        resolution_m: f64,
        pixels: Vec<Complex64>,
    },
}

impl FloatImage {
    /// SAR image as a complex dump; pixels are narrowed to `f32`.
    pub fn from_sar(sar: &SarImage) -> Self {
        FloatImage::Complex {
            width: sar.grid.width,
            height: sar.grid.height,
            resolution_m: sar.grid.resolution_m,
            pixels: sar.pixels.clone(),
        }
    }

    /// Rebuilds a SAR image on a grid anchored at the origin. The dump does
    /// not carry the grid origin, which later stages never need.
    pub fn into_sar(self) -> Result<SarImage> {
        match self {
            FloatImage::Complex {
                width,
                height,
                resolution_m,
                pixels,
            } => Ok(SarImage {
                grid: ImageGrid::new(width, height, resolution_m, Point2::default())?,
                pixels,
                scan_count: 0,
            }),
            FloatImage::Real(_) => Err(Error::Invalid(
                "expected a complex float dump, found a real one".into(),
            )),
        }
    }
}

pub fn encode_float(img: &FloatImage) -> Vec<u8> {
    let mut out = Vec::new();
    match img {
        FloatImage::Real(g) => {
            let _ = writeln!(out, "{} {} {}", g.width, g.height, g.resolution_m);
            for v in &g.pixels {
                out.extend_from_slice(&(*v as f32).to_le_bytes());
            }
        }
        FloatImage::Complex {
            width,
            height,
            resolution_m,
            pixels,
        } => {
            let _ = writeln!(out, "{width} {height} {resolution_m} complex");
            for p in pixels {
                out.extend_from_slice(&(p.re as f32).to_le_bytes());
                out.extend_from_slice(&(p.im as f32).to_le_bytes());
            }
        }
    }
    out
}

pub fn decode_float(bytes: &[u8]) -> Result<FloatImage> {
    let bad = |m: String| Error::Invalid(format!("float dump: {m}"));
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("missing header line".into()))?;
    let header =
        std::str::from_utf8(&bytes[..nl]).map_err(|_| bad("header is not ASCII".into()))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let complex = match tokens.as_slice() {
        [_, _, _] => false,
        [_, _, _, "complex"] => true,
        _ => return Err(bad(format!("unexpected header `{header}`"))),
    };
    let width: usize = tokens[0].parse().map_err(|_| bad("bad width".into()))?;
    let height: usize = tokens[1].parse().map_err(|_| bad("bad height".into()))?;
    let resolution_m: f64 = tokens[2]
        .parse()
        .map_err(|_| bad("bad resolution".into()))?;
    let data = &bytes[nl + 1..];
    let per_pixel = if complex { 8 } else { 4 };
    if data.len() != width * height * per_pixel {
        return Err(bad(format!(
            "payload has {} bytes, expected {}",
            data.len(),
            width * height * per_pixel
        )));
    }
    let floats: Vec<f64> = data
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().expect("4 bytes")) as f64)
        .collect();
    if complex {
        Ok(FloatImage::Complex {
            width,
            height,
            resolution_m,
            pixels: floats
                .chunks_exact(2)
                .map(|c| Complex64::new(c[0], c[1]))
                .collect(),
        })
    } else {
        Ok(FloatImage::Real(GrayImage::new(
            width,
            height,
            resolution_m,
            floats,
        )?))
    }
}

pub fn save_float(img: &FloatImage, path: &Path) -> Result<()> {
    fs::write(path, encode_float(img)).map_err(io_at(path))
}

pub fn load_float(path: &Path) -> Result<FloatImage> {
    decode_float(&fs::read(path).map_err(io_at(path))?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pgm_round_trip() {
        let img = Gray8::new(3, 2, vec![0, 10, 255, 7, 8, 9]).unwrap();
        let bytes = encode_pgm(&img);
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(decode_pgm(&bytes).unwrap(), img);
        assert_eq!(
            decode_pgm(b"P5\n# note\n3 2\n255\n\x00\x0a\xff\x07\x08\x09").unwrap(),
            img
        );
    }

    #[test]
    fn pgm_rejects_short_raster() {
        assert!(decode_pgm(b"P5\n3 2\n255\n\x00").is_err());
        assert!(decode_pgm(b"P2\n1 1\n255\n0").is_err());
    }

    #[test]
    fn float_round_trips() {
        let real = FloatImage::Real(GrayImage::new(2, 1, 0.005, vec![1.5, -0.25]).unwrap());
        let bytes = encode_float(&real);
        assert!(bytes.starts_with(b"2 1 0.005\n"));
        assert_eq!(decode_float(&bytes).unwrap(), real);

        let c = FloatImage::Complex {
            width: 1,
            height: 2,
            resolution_m: 0.01,
            pixels: vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0)],
        };
        let bytes = encode_float(&c);
        assert!(bytes.starts_with(b"1 2 0.01 complex\n"));
        assert_eq!(bytes.len(), 17 + 16);
        assert_eq!(decode_float(&bytes).unwrap(), c);
    }
}

//! Ultra-wideband synthetic aperture radar imaging and loop-closure detection.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the algorithms:
//!
//! * [`radar`]: radar parameters, Gaussian pulse synthesis, matched filtering,
//!   analytic-signal conversion and the range-bin axis.
//! * [`backprojection`]: field-of-view masking and back-projection of
//!   compressed scans onto a complex pixel grid.
//! * [`simulator`]: trajectories and point-scatterer echoes for desk-scale runs.
//! * [`image`]: positive-image enhancement, blur, quantization and the
//!   cell-wise map difference.
//! * [`features`]: segment-test corners with steered-pattern and
//!   concentric-ring binary descriptors.
//! * [`loopclose`]: Hamming matching, RANSAC similarity estimation and the
//!   dual-detector loop validation rule.
//!
//! File formats, configuration and the command-line frontend live in the
//! companion `uwbsar` crate.
#![no_std]
// `!(x >= lo)` rejects NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod backprojection;
pub mod features;
pub mod fft;
pub mod geometry;
pub mod image;
pub mod loopclose;
pub mod radar;
pub mod simulator;

pub use num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

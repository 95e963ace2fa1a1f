//! File formats, run configuration and stage drivers for UWB SAR mapping.
//!
//! The algorithms live in [`uwbsar_core`]; this crate adds everything that
//! needs `std`: the binary scan log, scene and trajectory text files, PGM and
//! float image dumps, feature-set files, tab-separated match reports, the
//! flat key=value [`RunConfig`](config::RunConfig) and the stage functions the
//! `uwbsar` binary is built from.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::io;
use std::path::PathBuf;

pub mod config;
pub mod demo;
pub mod featureio;
pub mod imageio;
pub mod report;
pub mod scanlog;
pub mod stages;
pub mod textio;

pub use uwbsar_core as core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Stream(#[from] io::Error),
    #[error("{what} line {line}: {message}")]
    Parse {
        what: &'static str,
        line: usize,
        message: String,
    },
    #[error("bad header: {0}")]
    Header(String),
    #[error("record {index}: {message}")]
    Record { index: usize, message: String },
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("{0} already exists (pass --overwrite to replace it)")]
    OutputExists(PathBuf),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Radar(#[from] uwbsar_core::radar::RadarError),
    #[error(transparent)]
    Sar(#[from] uwbsar_core::backprojection::SarError),
    #[error(transparent)]
    Sim(#[from] uwbsar_core::simulator::SimError),
    #[error(transparent)]
    Image(#[from] uwbsar_core::image::ImageError),
    #[error(transparent)]
    Feature(#[from] uwbsar_core::features::FeatureError),
    #[error(transparent)]
    Loop(#[from] uwbsar_core::loopclose::LoopError),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_at(path: &std::path::Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

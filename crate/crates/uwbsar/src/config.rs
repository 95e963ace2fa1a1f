//! Flat `key=value` run configuration.
//!
//! Every key has a default, so an empty file is a valid configuration.
//! Lines starting with `#` are comments. [`KEYS`] lists every key with a
//! one-line description; `RunConfig::default().to_text()` prints them all.

use std::fs;
use std::path::Path;

use uwbsar_core::features::{DetectorConfig, DetectorId};
use uwbsar_core::loopclose::{LoopThresholds, MatchSettings, RansacConfig};
use uwbsar_core::radar::RadarConfig;
use uwbsar_core::simulator::{noise_std_for_snr, OdometryNoise};

use crate::{io_at, Error, Result};

/// Environment variable naming the configuration file used when `--config` is absent.
pub const CONFIG_ENV: &str = "UWBSAR_CONFIG";

pub const KEYS: &[(&str, &str)] = &[
    ("seed", "seed for simulation noise and RANSAC sampling"),
    ("radar.sample_rate_hz", "ADC sample rate"),
    ("radar.center_freq_hz", "pulse centre frequency"),
    ("radar.bandwidth_hz", "pulse -6 dB bandwidth"),
    ("radar.pulse_amplitude_v", "pulse peak amplitude"),
    ("radar.beamwidth_deg", "full beamwidth of the field of view"),
    ("radar.range_min_m", "nearest imaged range"),
    ("radar.range_max_m", "farthest imaged range"),
    (
        "sim.mount_angles_deg",
        "comma-separated radar boresights relative to the heading",
    ),
    ("sim.scan_spacing_m", "path length between scans"),
    (
        "sim.snr_db",
        "echo-to-noise ratio of a unit-rcs scatterer at sim.snr_reference_m; inf disables noise",
    ),
    (
        "sim.snr_reference_m",
        "range of the reference scatterer for sim.snr_db",
    ),
    (
        "sim.odometry_translation_std_m",
        "per-step forward odometry error; 0 disables",
    ),
    (
        "sim.odometry_heading_std_rad",
        "per-step heading odometry error; 0 disables",
    ),
    ("grid.resolution_m", "pixel size"),
    (
        "grid.width_px",
        "image width; 0 sizes the grid to the trajectory plus grid.padding_m",
    ),
    (
        "grid.height_px",
        "image height; 0 sizes the grid to the trajectory plus grid.padding_m",
    ),
    (
        "grid.origin_x_m",
        "centre of pixel (0, 0) when the size is fixed",
    ),
    (
        "grid.origin_y_m",
        "centre of pixel (0, 0) when the size is fixed",
    ),
    (
        "grid.padding_m",
        "margin around the trajectory for automatic grids",
    ),
    (
        "sar.range_weighting",
        "multiply samples by range squared before summing",
    ),
    (
        "sar.split_pose",
        "poses in the first region of the pipeline; 0 takes the first half",
    ),
    ("post.blur_sigma_px", "Gaussian blur width"),
    (
        "post.occupancy_threshold",
        "gray level above which a cell is occupied, or otsu",
    ),
    ("detect.detectors", "comma-separated detector names"),
    (
        "detect.corner_threshold",
        "segment-test intensity threshold",
    ),
    ("detect.octaves", "pyramid levels"),
    ("detect.scale_factor", "pyramid scale step"),
    (
        "detect.max_keypoints",
        "keypoints kept per image, strongest first",
    ),
    ("match.ratio", "nearest/second-nearest distance ratio"),
    ("ransac.iterations", "RANSAC hypotheses"),
    ("ransac.inlier_px", "RANSAC inlier distance"),
    (
        "ransac.min_inliers",
        "fewest inliers for a transform to be reported",
    ),
    ("loop.min_good_matches", "good matches each detector needs"),
    ("loop.scale_tolerance", "allowed |scale - 1|"),
    (
        "loop.translation_tolerance_mm",
        "allowed cross-detector translation disagreement per axis",
    ),
    (
        "loop.rotation_tolerance_deg",
        "allowed cross-detector rotation disagreement",
    ),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occupancy {
    Otsu,
    Level(u8),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub resolution_m: f64,
    /// `None` sizes the grid to the trajectory.
    pub size_px: Option<(usize, usize)>,
    pub origin_m: (f64, f64),
    pub padding_m: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    /// Shared radar parameters; mount angles come from `mount_angles_rad`.
    pub radar: RadarConfig,
    pub mount_angles_rad: Vec<f64>,
    pub scan_spacing_m: f64,
    pub snr_db: f64,
    pub snr_reference_m: f64,
    pub odometry: OdometryNoise,
    pub grid: GridSpec,
    pub range_weighting: bool,
    pub split_pose: usize,
    pub blur_sigma_px: f64,
    pub occupancy: Occupancy,
    pub detectors: Vec<DetectorId>,
    pub corner_threshold: u8,
    pub octaves: usize,
    pub scale_factor: f64,
    pub max_keypoints: usize,
    pub ratio: f64,
    pub ransac: RansacConfig,
    pub thresholds: LoopThresholds,
}

impl Default for RunConfig {
    fn default() -> Self {
        let orb = DetectorConfig::orb();
        Self {
            seed: 1,
            radar: RadarConfig::lt102(),
            mount_angles_rad: vec![90f64.to_radians(), -90f64.to_radians()],
            scan_spacing_m: 1.5 / 59.0,
            snr_db: 20.0,
            snr_reference_m: 1.0,
            odometry: OdometryNoise {
                translation_std_m: 0.0,
                heading_std_rad: 0.0,
            },
            grid: GridSpec {
                resolution_m: 0.005,
                size_px: None,
                origin_m: (0.0, 0.0),
                padding_m: 1.0,
            },
            range_weighting: false,
            split_pose: 0,
            blur_sigma_px: 1.0,
            occupancy: Occupancy::Otsu,
            detectors: vec![DetectorId::ORB, DetectorId::BRISK],
            corner_threshold: orb.corner_threshold,
            octaves: orb.n_octaves,
            scale_factor: orb.scale_factor,
            max_keypoints: orb.target_keypoints,
            ratio: MatchSettings::default().ratio,
            ransac: RansacConfig::default(),
            thresholds: LoopThresholds::default(),
        }
    }
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config {
        key: key.into(),
        message: format!("cannot parse `{v}`"),
    })
}

fn list(v: &str) -> impl Iterator<Item = &str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Sets one key from its text value. Cross-key checks happen in [`validate`](Self::validate).
    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        let v = v.trim();
        match key {
            "seed" => self.seed = num(key, v)?,
            "radar.sample_rate_hz" => self.radar.sample_rate_hz = num(key, v)?,
            "radar.center_freq_hz" => self.radar.center_freq_hz = num(key, v)?,
            "radar.bandwidth_hz" => self.radar.bandwidth_hz = num(key, v)?,
            "radar.pulse_amplitude_v" => self.radar.pulse_amplitude_v = num(key, v)?,
            "radar.beamwidth_deg" => self.radar.beamwidth_rad = num::<f64>(key, v)?.to_radians(),
            "radar.range_min_m" => self.radar.range_min_m = num(key, v)?,
            "radar.range_max_m" => self.radar.range_max_m = num(key, v)?,
            "sim.mount_angles_deg" => {
                self.mount_angles_rad = list(v)
                    .map(|s| num::<f64>(key, s).map(f64::to_radians))
                    .collect::<Result<_>>()?
            }
            "sim.scan_spacing_m" => self.scan_spacing_m = num(key, v)?,
            "sim.snr_db" => self.snr_db = num(key, v)?,
            "sim.snr_reference_m" => self.snr_reference_m = num(key, v)?,
            "sim.odometry_translation_std_m" => self.odometry.translation_std_m = num(key, v)?,
            "sim.odometry_heading_std_rad" => self.odometry.heading_std_rad = num(key, v)?,
            "grid.resolution_m" => self.grid.resolution_m = num(key, v)?,
            "grid.width_px" | "grid.height_px" => {
                let n: usize = num(key, v)?;
                let (mut w, mut h) = self.grid.size_px.unwrap_or((0, 0));
                if key == "grid.width_px" {
                    w = n;
                } else {
                    h = n;
                }
                self.grid.size_px = if w == 0 && h == 0 { None } else { Some((w, h)) };
            }
            "grid.origin_x_m" => self.grid.origin_m.0 = num(key, v)?,
            "grid.origin_y_m" => self.grid.origin_m.1 = num(key, v)?,
            "grid.padding_m" => self.grid.padding_m = num(key, v)?,
            "sar.range_weighting" => self.range_weighting = num(key, v)?,
            "sar.split_pose" => self.split_pose = num(key, v)?,
            "post.blur_sigma_px" => self.blur_sigma_px = num(key, v)?,
            "post.occupancy_threshold" => {
                self.occupancy = if v.eq_ignore_ascii_case("otsu") {
                    Occupancy::Otsu
                } else {
                    Occupancy::Level(num(key, v)?)
                }
            }
            "detect.detectors" => {
                self.detectors = list(v)
                    .map(|name| {
                        DetectorId::parse(name).ok_or_else(|| Error::Config {
                            key: key.into(),
                            message: format!("unknown detector `{name}`"),
                        })
                    })
                    .collect::<Result<_>>()?
            }
            "detect.corner_threshold" => self.corner_threshold = num(key, v)?,
            "detect.octaves" => self.octaves = num(key, v)?,
            "detect.scale_factor" => self.scale_factor = num(key, v)?,
            "detect.max_keypoints" => self.max_keypoints = num(key, v)?,
            "match.ratio" => self.ratio = num(key, v)?,
            "ransac.iterations" => self.ransac.iterations = num(key, v)?,
            "ransac.inlier_px" => self.ransac.inlier_threshold_px = num(key, v)?,
            "ransac.min_inliers" => self.ransac.min_inliers = num(key, v)?,
            "loop.min_good_matches" => self.thresholds.min_good_matches = num(key, v)?,
            "loop.scale_tolerance" => self.thresholds.scale_tolerance = num(key, v)?,
            "loop.translation_tolerance_mm" => {
                self.thresholds.translation_tolerance_m = num::<f64>(key, v)? / 1000.0
            }
            "loop.rotation_tolerance_deg" => {
                self.thresholds.rotation_tolerance_rad = num::<f64>(key, v)?.to_radians()
            }
            _ => {
                return Err(Error::Config {
                    key: key.into(),
                    message: "unknown key".into(),
                })
            }
        }
        Ok(())
    }

    /// Applies `key=value` text on top of the defaults and validates the result.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                what: "config",
                line: i + 1,
                message: format!("expected key=value, got `{line}`"),
            })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&fs::read_to_string(path).map_err(io_at(path))?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, message: &str| {
            Err(Error::Config {
                key: key.into(),
                message: message.into(),
            })
        };
        for cfg in self.radar_configs() {
            cfg.validate()?;
        }
        if self.mount_angles_rad.is_empty() {
            return bad("sim.mount_angles_deg", "need at least one radar");
        }
        if !(self.scan_spacing_m > 0.0 && self.scan_spacing_m.is_finite()) {
            return bad("sim.scan_spacing_m", "must be positive");
        }
        if self.snr_db.is_nan() {
            return bad("sim.snr_db", "must be a number");
        }
        if !(self.snr_reference_m > 0.0 && self.snr_reference_m.is_finite()) {
            return bad("sim.snr_reference_m", "must be positive");
        }
        if !(self.odometry.translation_std_m >= 0.0 && self.odometry.heading_std_rad >= 0.0) {
            return bad(
                "sim.odometry_translation_std_m",
                "odometry noise must be >= 0",
            );
        }
        if !(self.grid.resolution_m > 0.0 && self.grid.resolution_m.is_finite()) {
            return bad("grid.resolution_m", "must be positive");
        }
        if let Some((w, h)) = self.grid.size_px {
            if w == 0 || h == 0 {
                return bad(
                    "grid.width_px",
                    "set both grid.width_px and grid.height_px, or neither",
                );
            }
        }
        if !(self.grid.padding_m >= 0.0) {
            return bad("grid.padding_m", "must be >= 0");
        }
        if !(self.blur_sigma_px >= 0.0 && self.blur_sigma_px.is_finite()) {
            return bad("post.blur_sigma_px", "must be >= 0");
        }
        if self.detectors.is_empty() {
            return bad("detect.detectors", "need at least one detector");
        }
        for d in &self.detectors {
            self.detector_config(*d).validate()?;
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return bad("match.ratio", "must lie in (0, 1)");
        }
        if self.ransac.iterations == 0 {
            return bad("ransac.iterations", "must be positive");
        }
        if !(self.ransac.inlier_threshold_px > 0.0) {
            return bad("ransac.inlier_px", "must be positive");
        }
        let t = &self.thresholds;
        if !(t.scale_tolerance >= 0.0
            && t.translation_tolerance_m >= 0.0
            && t.rotation_tolerance_rad >= 0.0)
        {
            return bad("loop.scale_tolerance", "tolerances must be >= 0");
        }
        Ok(())
    }

    /// One radar configuration per mount.
    pub fn radar_configs(&self) -> Vec<RadarConfig> {
        self.mount_angles_rad
            .iter()
            .map(|&a| self.radar.with_mount_angle(a))
            .collect()
    }

    pub fn detector_config(&self, detector: DetectorId) -> DetectorConfig {
        DetectorConfig {
            detector,
            corner_threshold: self.corner_threshold,
            n_octaves: self.octaves,
            scale_factor: self.scale_factor,
            target_keypoints: self.max_keypoints,
        }
    }

    pub fn match_settings(&self) -> MatchSettings {
        MatchSettings {
            ratio: self.ratio,
            ransac: self.ransac,
            seed: self.seed,
            resolution_m: self.grid.resolution_m,
        }
    }

    /// Raw-sample noise giving the configured SNR for the reference echo.
    pub fn noise_std(&self) -> f64 {
        if self.snr_db == f64::INFINITY {
            return 0.0;
        }
        let reference =
            self.radar.pulse_amplitude_v / (self.snr_reference_m * self.snr_reference_m);
        noise_std_for_snr(reference, self.snr_db)
    }

    pub fn odometry_noise(&self) -> Option<OdometryNoise> {
        (self.odometry.translation_std_m > 0.0 || self.odometry.heading_std_rad > 0.0)
            .then_some(self.odometry)
    }

    fn get(&self, key: &str) -> String {
        let r = &self.radar;
        let t = &self.thresholds;
        match key {
            "seed" => self.seed.to_string(),
            "radar.sample_rate_hz" => r.sample_rate_hz.to_string(),
            "radar.center_freq_hz" => r.center_freq_hz.to_string(),
            "radar.bandwidth_hz" => r.bandwidth_hz.to_string(),
            "radar.pulse_amplitude_v" => r.pulse_amplitude_v.to_string(),
            "radar.beamwidth_deg" => r.beamwidth_rad.to_degrees().to_string(),
            "radar.range_min_m" => r.range_min_m.to_string(),
            "radar.range_max_m" => r.range_max_m.to_string(),
            "sim.mount_angles_deg" => join(self.mount_angles_rad.iter().map(|a| a.to_degrees())),
            "sim.scan_spacing_m" => self.scan_spacing_m.to_string(),
            "sim.snr_db" => self.snr_db.to_string(),
            "sim.snr_reference_m" => self.snr_reference_m.to_string(),
            "sim.odometry_translation_std_m" => self.odometry.translation_std_m.to_string(),
            "sim.odometry_heading_std_rad" => self.odometry.heading_std_rad.to_string(),
            "grid.resolution_m" => self.grid.resolution_m.to_string(),
            "grid.width_px" => self.grid.size_px.map_or(0, |s| s.0).to_string(),
            "grid.height_px" => self.grid.size_px.map_or(0, |s| s.1).to_string(),
            "grid.origin_x_m" => self.grid.origin_m.0.to_string(),
            "grid.origin_y_m" => self.grid.origin_m.1.to_string(),
            "grid.padding_m" => self.grid.padding_m.to_string(),
            "sar.range_weighting" => self.range_weighting.to_string(),
            "sar.split_pose" => self.split_pose.to_string(),
            "post.blur_sigma_px" => self.blur_sigma_px.to_string(),
            "post.occupancy_threshold" => match self.occupancy {
                Occupancy::Otsu => "otsu".into(),
                Occupancy::Level(l) => l.to_string(),
            },
            "detect.detectors" => join(self.detectors.iter()),
            "detect.corner_threshold" => self.corner_threshold.to_string(),
            "detect.octaves" => self.octaves.to_string(),
            "detect.scale_factor" => self.scale_factor.to_string(),
            "detect.max_keypoints" => self.max_keypoints.to_string(),
            "match.ratio" => self.ratio.to_string(),
            "ransac.iterations" => self.ransac.iterations.to_string(),
            "ransac.inlier_px" => self.ransac.inlier_threshold_px.to_string(),
            "ransac.min_inliers" => self.ransac.min_inliers.to_string(),
            "loop.min_good_matches" => t.min_good_matches.to_string(),
            "loop.scale_tolerance" => t.scale_tolerance.to_string(),
            "loop.translation_tolerance_mm" => (t.translation_tolerance_m * 1000.0).to_string(),
            "loop.rotation_tolerance_deg" => t.rotation_tolerance_rad.to_degrees().to_string(),
            _ => unreachable!("key table and getter disagree on {key}"),
        }
    }

    /// Every key with its current value, one per line, preceded by its description.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (key, doc) in KEYS {
            s.push_str(&format!("# {doc}\n{key}={}\n", self.get(key)));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(RunConfig::from_text("").unwrap(), RunConfig::default());
        assert_eq!(
            RunConfig::from_text("# only a comment\n\n").unwrap(),
            RunConfig::default()
        );
    }

    #[test]
    fn every_key_round_trips_through_text() {
        let d = RunConfig::default();
        let back = RunConfig::from_text(&d.to_text()).unwrap();
        assert_eq!(back.to_text(), d.to_text());
        assert_eq!(back.detectors, d.detectors);
        assert!((back.radar.beamwidth_rad - d.radar.beamwidth_rad).abs() < 1e-15);
    }

    #[test]
    fn overrides_and_errors() {
        let c = RunConfig::from_text(
            "loop.min_good_matches = 30\npost.occupancy_threshold=40\ndetect.detectors=brisk\ngrid.width_px=10\ngrid.height_px=20\n",
        )
        .unwrap();
        assert_eq!(c.thresholds.min_good_matches, 30);
        assert_eq!(c.occupancy, Occupancy::Level(40));
        assert_eq!(c.detectors, vec![DetectorId::BRISK]);
        assert_eq!(c.grid.size_px, Some((10, 20)));

        assert!(matches!(
            RunConfig::from_text("nope=1"),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            RunConfig::from_text("match.ratio=1.5"),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            RunConfig::from_text("grid.width_px=10"),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            RunConfig::from_text("radar.range_min_m=5"),
            Err(Error::Radar(_))
        ));
        assert!(matches!(
            RunConfig::from_text("garbage"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn keys_table_matches_setter() {
        let mut c = RunConfig::default();
        for (key, _) in KEYS {
            let v = c.get(key);
            c.set(key, &v).unwrap_or_else(|e| panic!("{key}: {e}"));
        }
    }

    #[test]
    fn infinite_snr_disables_noise() {
        assert_eq!(
            RunConfig::from_text("sim.snr_db=inf").unwrap().noise_std(),
            0.0
        );
        assert!((RunConfig::default().noise_std() - 0.1).abs() < 1e-12);
    }
}

//! Point-scatterer forward model and synthetic trajectories.
//!
//! Echo amplitude of a scatterer at range `R` is `sqrt(rcs) / R^2` times the
//! transmitted pulse, delayed by the round trip `2R/c`. Only scatterers inside
//! the radar's field-of-view cone contribute. Optional white Gaussian noise is
//! drawn from a caller-supplied generator.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::backprojection::{in_fov, ImageGrid};
use crate::geometry::{Point2, Pose2};
use crate::image::BinaryGrid;
use crate::radar::{range_bin_spacing, RadarConfig, RadarError, RawScan, Waveform};
use crate::SPEED_OF_LIGHT;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

/// Envelope level beyond which a replica is not evaluated.
const REPLICA_CUTOFF: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("scatterer {index} is invalid (rcs must be >= 0 and position finite)")]
    InvalidScatterer { index: usize },
    #[error("trajectory needs at least two waypoints")]
    TooFewWaypoints,
    #[error("scan spacing must be positive")]
    NonPositiveSpacing,
    #[error("trajectory has zero length")]
    DegeneratePath,
    #[error("trajectory declares no radars")]
    NoRadars,
    #[error("{n_bins} bins cover {covered_m:.3} m, less than the maximum range {range_max_m} m")]
    TooFewBins {
        n_bins: usize,
        covered_m: f64,
        range_max_m: f64,
    },
    #[error("noise standard deviation must be finite and >= 0")]
    InvalidNoise,
    #[error(transparent)]
    Radar(#[from] RadarError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Scatterer {
    pub position: Point2,
    pub rcs: f64,
}

impl Scatterer {
    pub fn new(x: f64, y: f64, rcs: f64) -> Self {
        Self {
            position: Point2::new(x, y),
            rcs,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.position.is_finite() && self.rcs >= 0.0 && self.rcs.is_finite()
    }
}

/// Where a radar sits on the robot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadarMount {
    pub mount_angle_rad: f64,
    /// Phase-centre offset in the robot body frame (x forward, y left).
    pub lever_arm: Point2,
}

impl RadarMount {
    pub fn new(mount_angle_rad: f64) -> Self {
        Self {
            mount_angle_rad,
            lever_arm: Point2::default(),
        }
    }

    /// Left- and right-looking radars at the robot centre.
    pub fn side_pair() -> Vec<RadarMount> {
        use core::f64::consts::FRAC_PI_2;
        vec![RadarMount::new(FRAC_PI_2), RadarMount::new(-FRAC_PI_2)]
    }
}

/// Per-step Gaussian odometry error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdometryNoise {
    pub translation_std_m: f64,
    pub heading_std_rad: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySpec {
    /// Path vertices; only positions are used, headings follow the path.
    pub waypoints: Vec<Pose2>,
    pub scan_spacing_m: f64,
    pub radar_mounts: Vec<RadarMount>,
    pub odometry_noise: Option<OdometryNoise>,
}

impl TrajectorySpec {
    pub fn new(waypoints: Vec<Pose2>, scan_spacing_m: f64) -> Self {
        Self {
            waypoints,
            scan_spacing_m,
            radar_mounts: RadarMount::side_pair(),
            odometry_noise: None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.waypoints.len() < 2 {
            return Err(SimError::TooFewWaypoints);
        }
        if !(self.scan_spacing_m > 0.0) || !self.scan_spacing_m.is_finite() {
            return Err(SimError::NonPositiveSpacing);
        }
        if self.radar_mounts.is_empty() {
            return Err(SimError::NoRadars);
        }
        Ok(())
    }

    /// Radar configs for each mount, sharing everything but the mount angle.
    pub fn radar_configs(&self, base: &RadarConfig) -> Vec<RadarConfig> {
        self.radar_mounts
            .iter()
            .map(|m| base.with_mount_angle(m.mount_angle_rad))
            .collect()
    }
}

/// One acquisition position: the robot and each of its radars.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySample {
    pub robot: Pose2,
    pub radars: Vec<Pose2>,
}

fn radar_poses(robot: &Pose2, mounts: &[RadarMount]) -> Vec<Pose2> {
    mounts
        .iter()
        .map(|m| {
            let p = robot.transform_point(m.lever_arm);
            Pose2::new(p.x, p.y, robot.theta)
        })
        .collect()
}

/// Samples the piecewise-linear path every `scan_spacing_m` of arc length,
/// starting at the first waypoint. A pose exactly on an interior waypoint
/// takes the heading of the outgoing segment.
pub fn generate_trajectory(spec: &TrajectorySpec) -> Result<Vec<TrajectorySample>, SimError> {
    spec.validate()?;
    let segments: Vec<(Point2, Point2, f64)> = spec
        .waypoints
        .windows(2)
        .map(|w| {
            (
                w[0].position(),
                w[1].position(),
                w[0].position().distance(&w[1].position()),
            )
        })
        .filter(|s| s.2 > 0.0)
        .collect();
    let total: f64 = segments.iter().map(|s| s.2).sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(SimError::DegeneratePath);
    }
    let count = (total / spec.scan_spacing_m + 1e-9).floor() as usize + 1;
    let mut out = Vec::with_capacity(count);
    let mut seg = 0;
    let mut seg_start = 0.0;
    for i in 0..count {
        let s = (i as f64 * spec.scan_spacing_m).min(total);
        while seg + 1 < segments.len() && s >= seg_start + segments[seg].2 - 1e-12 {
            seg_start += segments[seg].2;
            seg += 1;
        }
        let (a, b, len) = segments[seg];
        let u = ((s - seg_start) / len).clamp(0.0, 1.0);
        let heading = (b.y - a.y).atan2(b.x - a.x);
        let robot = Pose2::new(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y), heading);
        out.push(TrajectorySample {
            radars: radar_poses(&robot, &spec.radar_mounts),
            robot,
        });
    }
    Ok(out)
}

/// Odometry-style estimate of a true trajectory: per-step translation and
/// heading errors accumulate along the path.
pub fn perturb_odometry<R: Rng + ?Sized>(
    truth: &[TrajectorySample],
    mounts: &[RadarMount],
    noise: &OdometryNoise,
    rng: &mut R,
) -> Result<Vec<TrajectorySample>, SimError> {
    let trans = Normal::new(0.0, noise.translation_std_m).map_err(|_| SimError::InvalidNoise)?;
    let head = Normal::new(0.0, noise.heading_std_rad).map_err(|_| SimError::InvalidNoise)?;
    let mut out: Vec<TrajectorySample> = Vec::with_capacity(truth.len());
    for (i, sample) in truth.iter().enumerate() {
        let robot = match out.last() {
            None => sample.robot,
            Some(prev) => {
                let before = &truth[i - 1].robot;
                // relative motion in the previous body frame, then corrupted
                let (dx, dy) = (sample.robot.x - before.x, sample.robot.y - before.y);
                let (s, c) = before.theta.sin_cos();
                let fwd = c * dx + s * dy + trans.sample(rng);
                let lat = -s * dx + c * dy;
                let dtheta = sample.robot.theta - before.theta + head.sample(rng);
                let p = prev.robot.transform_point(Point2::new(fwd, lat));
                Pose2::new(p.x, p.y, prev.robot.theta + dtheta)
            }
        };
        out.push(TrajectorySample {
            radars: radar_poses(&robot, mounts),
            robot,
        });
    }
    Ok(out)
}

/// Noise standard deviation giving `snr_db` for a sinusoid-peak `amplitude`.
pub fn noise_std_for_snr(amplitude: f64, snr_db: f64) -> f64 {
    amplitude / 10f64.powf(snr_db / 20.0)
}

/// Raw echo recorded by one radar, `n_bins` samples from zero delay.
pub fn simulate_echo<R: Rng + ?Sized>(
    scene: &[Scatterer],
    radar: &Pose2,
    config: &RadarConfig,
    n_bins: usize,
    noise_std: f64,
    rng: &mut R,
) -> Result<RawScan, SimError> {
    config.validate()?;
    if let Some(index) = scene.iter().position(|s| !s.is_valid()) {
        return Err(SimError::InvalidScatterer { index });
    }
    let covered_m = n_bins as f64 * range_bin_spacing(config);
    if covered_m < config.range_max_m {
        return Err(SimError::TooFewBins {
            n_bins,
            covered_m,
            range_max_m: config.range_max_m,
        });
    }
    if !(noise_std >= 0.0) || !noise_std.is_finite() {
        return Err(SimError::InvalidNoise);
    }
    let fs = config.sample_rate_hz;
    let half_window = config.envelope_cutoff(REPLICA_CUTOFF) * fs;
    let mut samples = vec![0.0; n_bins];
    for s in scene {
        if s.rcs == 0.0 || !in_fov(s.position, radar, config) {
            continue;
        }
        let r = s.position.distance(&radar.position());
        let delay = 2.0 * r / SPEED_OF_LIGHT;
        let amplitude = s.rcs.sqrt() / (r * r);
        let centre = delay * fs;
        let lo = (centre - half_window).floor().max(0.0) as usize;
        let hi = ((centre + half_window).ceil() as usize).min(n_bins.saturating_sub(1));
        for (k, slot) in samples.iter_mut().enumerate().take(hi + 1).skip(lo) {
            *slot += amplitude * config.pulse_value(k as f64 / fs - delay);
        }
    }
    if noise_std > 0.0 {
        let normal = Normal::new(0.0, noise_std).map_err(|_| SimError::InvalidNoise)?;
        for v in samples.iter_mut() {
            *v += normal.sample(rng);
        }
    }
    Ok(RawScan {
        pose: *radar,
        waveform: Waveform::new(samples, 0.0, fs)?,
    })
}

/// Output of a full forward simulation.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulatedRun {
    /// `(radar_index, scan)` in acquisition order: pose-major, radar-minor.
    pub scans: Vec<(usize, RawScan)>,
    /// Cells containing at least one scatterer with positive rcs.
    pub truth: BinaryGrid,
}

/// Simulates every radar at every trajectory sample and rasterizes the scene truth.
#[allow(clippy::too_many_arguments)]
pub fn render_scene<R: Rng + ?Sized>(
    scene: &[Scatterer],
    trajectory: &[TrajectorySample],
    configs: &[RadarConfig],
    grid: &ImageGrid,
    n_bins: usize,
    noise_std: f64,
    rng: &mut R,
) -> Result<SimulatedRun, SimError> {
    let mut scans = Vec::with_capacity(trajectory.len() * configs.len());
    for sample in trajectory {
        if sample.radars.len() != configs.len() {
            return Err(SimError::NoRadars);
        }
        for (i, (pose, cfg)) in sample.radars.iter().zip(configs).enumerate() {
            scans.push((i, simulate_echo(scene, pose, cfg, n_bins, noise_std, rng)?));
        }
    }
    let mut truth = BinaryGrid::new(grid.width, grid.height);
    for s in scene.iter().filter(|s| s.rcs > 0.0) {
        if let Some((col, row)) = grid.pixel_of(s.position) {
            truth.set(col, row, true);
        }
    }
    Ok(SimulatedRun { scans, truth })
}

/// Smallest bin count reaching `range_max` (plus the pulse tail).
pub fn bins_for_config(config: &RadarConfig) -> usize {
    let tail = config.envelope_cutoff(REPLICA_CUTOFF) * config.sample_rate_hz;
    (config.range_max_m / range_bin_spacing(config) + tail).ceil() as usize + 1
}

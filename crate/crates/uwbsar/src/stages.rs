//! One function per processing stage, shared by the CLI commands and the pipeline.
//!
//! Each stage consumes exactly what the previous stage writes to disk, so
//! running the stages one at a time produces the same bytes as the pipeline.

use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uwbsar_core::backprojection::{BackprojectOptions, ImageGrid, SarAccumulator, SarImage};
use uwbsar_core::features::{detect_and_describe, DetectorId, FeatureSet};
use uwbsar_core::geometry::{Point2, Pose2};
use uwbsar_core::image::{
    cellwise_difference, enhance, otsu_threshold, threshold, BinaryGrid, Gray8,
};
use uwbsar_core::loopclose::{match_features, validate_loop, LoopDecision, MatchReport};
use uwbsar_core::radar::{compress, default_pulse};
use uwbsar_core::simulator::{
    bins_for_config, generate_trajectory, perturb_odometry, render_scene, Scatterer, TrajectorySpec,
};
use uwbsar_core::Complex64;

use crate::config::{Occupancy, RunConfig};
use crate::featureio::save_features;
use crate::imageio::{encode_float, encode_pgm, FloatImage};
use crate::report::{format_decisions, format_match_reports, NamedReport};
use crate::scanlog::ScanLog;
use crate::{featureio, io_at, Error, Result};

/// Nominal time between acquisition positions, used for record timestamps.
pub const SCAN_PERIOD_S: f64 = 0.1;

/// Grid for a run: fixed by the configuration, or sized to `positions`.
pub fn grid_for(cfg: &RunConfig, positions: impl IntoIterator<Item = Point2>) -> Result<ImageGrid> {
    let g = &cfg.grid;
    Ok(match g.size_px {
        Some((w, h)) => ImageGrid::new(
            w,
            h,
            g.resolution_m,
            Point2::new(g.origin_m.0, g.origin_m.1),
        )?,
        None => ImageGrid::covering(positions, g.padding_m, g.resolution_m)?,
    })
}

/// Simulated run: the scan log (with odometry poses when drift is enabled)
/// and the ground-truth occupancy on the run's grid.
pub struct Simulation {
    pub log: ScanLog,
    pub truth: BinaryGrid,
    pub grid: ImageGrid,
}

pub fn simulate(cfg: &RunConfig, scene: &[Scatterer], waypoints: &[Pose2]) -> Result<Simulation> {
    cfg.validate()?;
    let mut spec = TrajectorySpec::new(waypoints.to_vec(), cfg.scan_spacing_m);
    spec.radar_mounts = cfg
        .mount_angles_rad
        .iter()
        .map(|&a| uwbsar_core::simulator::RadarMount::new(a))
        .collect();
    spec.odometry_noise = cfg.odometry_noise();
    let truth_path = generate_trajectory(&spec)?;
    let configs = cfg.radar_configs();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let believed = match &spec.odometry_noise {
        Some(noise) => perturb_odometry(&truth_path, &spec.radar_mounts, noise, &mut rng)?,
        None => truth_path.clone(),
    };
    let grid = grid_for(
        cfg,
        believed
            .iter()
            .flat_map(|s| s.radars.iter().map(|p| p.position())),
    )?;
    let n_bins = bins_for_config(&cfg.radar);
    let run = render_scene(
        scene,
        &truth_path,
        &configs,
        &grid,
        n_bins,
        cfg.noise_std(),
        &mut rng,
    )?;

    let mut log = ScanLog::new(cfg.radar, cfg.mount_angles_rad.clone(), n_bins);
    let per_pose = configs.len();
    for (k, (radar, scan)) in run.scans.iter().enumerate() {
        let pose_index = k / per_pose;
        let mut scan = scan.clone();
        scan.pose = believed[pose_index].radars[*radar];
        log.push_scan(pose_index as f64 * SCAN_PERIOD_S, *radar, &scan)?;
    }
    Ok(Simulation {
        log,
        truth: run.truth,
        grid,
    })
}

/// Record indices grouped by acquisition position (consecutive equal timestamps).
pub fn pose_groups(log: &ScanLog) -> Vec<Range<usize>> {
    let mut groups: Vec<Range<usize>> = Vec::new();
    for (i, r) in log.records.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if log.records[g.start].timestamp_s == r.timestamp_s => g.end = i + 1,
            _ => groups.push(i..i + 1),
        }
    }
    groups
}

/// Back-projects the records of acquisition positions `poses` (all when `None`).
///
/// Pixels are rounded to `f32`, the precision of the float dump, so that
/// later stages see the same values whether they read the dump or not.
pub fn backproject(
    cfg: &RunConfig,
    log: &ScanLog,
    poses: Option<Range<usize>>,
) -> Result<SarImage> {
    let groups = pose_groups(log);
    let poses = poses.unwrap_or(0..groups.len());
    if poses.start >= poses.end || poses.end > groups.len() {
        return Err(Error::Invalid(format!(
            "pose range {}..{} is empty or outside the log's {} positions",
            poses.start,
            poses.end,
            groups.len()
        )));
    }
    let grid = grid_for(cfg, log.records.iter().map(|r| r.pose.position()))?;
    let pulse = default_pulse(&log.config)?;
    let options = BackprojectOptions {
        range_weighting: cfg.range_weighting,
    };
    let mut acc = SarAccumulator::new(grid, options)?;
    for g in &groups[poses] {
        for i in g.clone() {
            let radar = log.records[i].radar_index as usize;
            let config = log.radar_config(radar).expect("validated radar index");
            acc.add_scan(&compress(&log.raw_scan(i)?, &pulse)?, &config)?;
        }
    }
    let mut sar = acc.finish()?;
    for p in sar.pixels.iter_mut() {
        *p = Complex64::new(p.re as f32 as f64, p.im as f32 as f64);
    }
    Ok(sar)
}

/// Enhanced 8-bit image and its occupancy grid.
pub struct PostOutput {
    pub image: Gray8,
    pub level: u8,
    pub occupancy: BinaryGrid,
}

pub fn post(cfg: &RunConfig, sar: &SarImage) -> Result<PostOutput> {
    let (_, image) = enhance(sar, cfg.blur_sigma_px)?;
    let level = match cfg.occupancy {
        Occupancy::Otsu => otsu_threshold(&image),
        Occupancy::Level(l) => l,
    };
    let occupancy = threshold(&image, level);
    Ok(PostOutput {
        image,
        level,
        occupancy,
    })
}

pub fn occupancy_image(grid: &BinaryGrid) -> Gray8 {
    Gray8::new(
        grid.width,
        grid.height,
        grid.cells
            .iter()
            .map(|&c| if c { 255 } else { 0 })
            .collect(),
    )
    .expect("sizes agree")
}

/// Reads an occupancy image: non-zero pixels are occupied.
pub fn occupancy_from_image(img: &Gray8) -> BinaryGrid {
    BinaryGrid {
        width: img.width,
        height: img.height,
        cells: img.pixels.iter().map(|&p| p > 0).collect(),
    }
}

pub fn map_difference(occupancy: &BinaryGrid, truth: &BinaryGrid) -> Result<f64> {
    Ok(cellwise_difference(occupancy, truth)?)
}

pub fn detect(cfg: &RunConfig, image: &Gray8, detector: DetectorId) -> Result<FeatureSet> {
    Ok(detect_and_describe(image, &cfg.detector_config(detector))?)
}

pub fn match_sets(cfg: &RunConfig, a: &FeatureSet, b: &FeatureSet) -> Result<MatchReport> {
    Ok(match_features(a, b, &cfg.match_settings())?)
}

/// Validates every region pair in `reports` with its first two distinct detectors.
pub fn loopclose(
    cfg: &RunConfig,
    reports: &[NamedReport],
) -> Result<Vec<(String, String, LoopDecision)>> {
    let mut pairs: Vec<(String, String, Vec<&MatchReport>)> = Vec::new();
    for r in reports {
        match pairs
            .iter_mut()
            .find(|(a, b, _)| *a == r.region_a && *b == r.region_b)
        {
            Some((_, _, list)) => {
                if list.iter().all(|m| m.detector != r.report.detector) {
                    list.push(&r.report);
                }
            }
            None => pairs.push((r.region_a.clone(), r.region_b.clone(), vec![&r.report])),
        }
    }
    if pairs.is_empty() {
        return Err(Error::Invalid("no match reports to validate".into()));
    }
    pairs
        .into_iter()
        .map(|(a, b, list)| {
            if list.len() < 2 {
                return Err(Error::Invalid(format!(
                    "region pair {a}/{b} has reports from only one detector ({})",
                    list[0].detector
                )));
            }
            let d = validate_loop(list[0], list[1], &cfg.thresholds)?;
            Ok((a, b, d))
        })
        .collect()
}

/// Writes `bytes` to `path`, refusing to replace an existing file unless `overwrite`.
pub fn write_output(path: &Path, bytes: &[u8], overwrite: bool) -> Result<()> {
    if !overwrite && path.exists() {
        return Err(Error::OutputExists(path.to_path_buf()));
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_at(dir))?;
    }
    fs::write(path, bytes).map_err(io_at(path))
}

/// Region name of a stage file: its file name up to the first dot.
pub fn region_name(path: &Path) -> String {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    name.split('.').next().unwrap_or("").to_string()
}

/// Files written by [`pipeline`].
#[derive(Debug, Default)]
pub struct PipelineOutputs {
    pub files: Vec<PathBuf>,
    pub map_difference: f64,
    pub decisions: Vec<(String, String, LoopDecision)>,
}

/// Simulation, imaging and loop validation end to end.
///
/// The whole run is imaged as `map`; the first `sar.split_pose` positions
/// (half when 0) and the remaining ones are imaged separately as regions
/// `region_a` and `region_b`, which are then matched and validated.
pub fn pipeline(
    cfg: &RunConfig,
    scene: &[Scatterer],
    waypoints: &[Pose2],
    out: &Path,
    overwrite: bool,
) -> Result<PipelineOutputs> {
    let mut files = Vec::new();
    let mut emit = |name: &str, bytes: Vec<u8>| -> Result<PathBuf> {
        let path = out.join(name);
        write_output(&path, &bytes, overwrite)?;
        files.push(path.clone());
        Ok(path)
    };

    let sim = simulate(cfg, scene, waypoints)?;
    let mut log_bytes = Vec::new();
    sim.log.write_to(&mut log_bytes)?;
    emit("scans.log", log_bytes)?;
    emit("truth.pgm", encode_pgm(&occupancy_image(&sim.truth)))?;

    let n_poses = pose_groups(&sim.log).len();
    let split = if cfg.split_pose == 0 {
        n_poses.div_ceil(2)
    } else {
        cfg.split_pose
    };
    if split >= n_poses {
        return Err(Error::Config {
            key: "sar.split_pose".into(),
            message: format!(
                "{split} leaves no positions for the second region (run has {n_poses})"
            ),
        });
    }

    let map = backproject(cfg, &sim.log, None)?;
    emit("map.sar", encode_float(&FloatImage::from_sar(&map)))?;
    let map_post = post(cfg, &map)?;
    emit("map.pgm", encode_pgm(&map_post.image))?;
    emit(
        "map.occupancy.pgm",
        encode_pgm(&occupancy_image(&map_post.occupancy)),
    )?;
    let map_difference = map_difference(&map_post.occupancy, &sim.truth)?;

    let mut rows = Vec::new();
    let mut features: Vec<Vec<FeatureSet>> = Vec::new();
    for (name, range) in [("region_a", 0..split), ("region_b", split..n_poses)] {
        let sar = backproject(cfg, &sim.log, Some(range))?;
        emit(
            &format!("{name}.sar"),
            encode_float(&FloatImage::from_sar(&sar)),
        )?;
        let p = post(cfg, &sar)?;
        emit(&format!("{name}.pgm"), encode_pgm(&p.image))?;
        let mut sets = Vec::new();
        for &d in &cfg.detectors {
            let set = detect(cfg, &p.image, d)?;
            emit(
                &format!("{name}.{d}.feat"),
                featureio::encode_features(&set)?,
            )?;
            sets.push(set);
        }
        features.push(sets);
    }
    for (a, b) in features[0].iter().zip(&features[1]) {
        rows.push(NamedReport {
            region_a: "region_a".into(),
            region_b: "region_b".into(),
            report: match_sets(cfg, a, b)?,
        });
    }
    let text = format_match_reports(&rows);
    emit("matches.tsv", text.clone().into_bytes())?;
    // validation reads the reports back as the loopclose command would
    let decisions = loopclose(cfg, &crate::report::parse_match_reports(&text)?)?;
    emit("loops.tsv", format_decisions(&decisions).into_bytes())?;
    emit(
        "metrics.tsv",
        format!(
            "map_occupancy_level\tmap_cellwise_difference\n{}\t{}\n",
            map_post.level, map_difference
        )
        .into_bytes(),
    )?;
    Ok(PipelineOutputs {
        files,
        map_difference,
        decisions,
    })
}

/// Saves a feature set, honouring `overwrite`.
pub fn write_features(set: &FeatureSet, path: &Path, overwrite: bool) -> Result<()> {
    if !overwrite && path.exists() {
        return Err(Error::OutputExists(path.to_path_buf()));
    }
    save_features(set, path)
}

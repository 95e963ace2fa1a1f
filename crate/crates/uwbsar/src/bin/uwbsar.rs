use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use uwbsar::config::{RunConfig, CONFIG_ENV};
use uwbsar::core::features::DetectorId;
use uwbsar::featureio::{encode_features, load_features};
use uwbsar::imageio::{encode_float, encode_pgm, load_float, load_pgm, FloatImage};
use uwbsar::report::{format_decisions, format_match_reports, load_match_reports, NamedReport};
use uwbsar::scanlog::ScanLog;
use uwbsar::stages::{self, write_output};
use uwbsar::{demo, textio};

/// UWB synthetic aperture radar imaging and loop-closure detection.
#[derive(Parser, Debug)]
#[command(name = "uwbsar", version, about)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Flat key=value configuration file
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Overrides the `seed` key
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for files without an explicit path
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Replace existing output files
    #[arg(long, global = true)]
    overwrite: bool,
    /// Overrides any configuration key, e.g. --set loop.min_good_matches=25
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Overrides loop.min_good_matches
    #[arg(long, global = true)]
    min_good_matches: Option<usize>,
    /// Overrides match.ratio
    #[arg(long, global = true)]
    ratio: Option<f64>,
    /// Overrides detect.corner_threshold
    #[arg(long, global = true)]
    corner_threshold: Option<u8>,
    /// Overrides post.occupancy_threshold (a gray level or `otsu`)
    #[arg(long, global = true)]
    occupancy_threshold: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a scene and write a scan log and the truth occupancy image
    Simulate {
        /// Scene table (x_m y_m rcs); the bundled demo scene when absent
        #[arg(long)]
        scene: Option<PathBuf>,
        /// Waypoint table (x_m y_m theta_rad); the bundled demo path when absent
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long, default_value = "scans.log")]
        output: PathBuf,
        #[arg(long, default_value = "truth.pgm")]
        truth: PathBuf,
    },
    /// Back-project a scan log into a complex float dump
    Backproject {
        #[arg(long)]
        scans: PathBuf,
        /// First acquisition position to use
        #[arg(long)]
        first_pose: Option<usize>,
        /// One past the last acquisition position to use
        #[arg(long)]
        end_pose: Option<usize>,
        #[arg(long, default_value = "map.sar")]
        output: PathBuf,
    },
    /// Enhance a SAR dump into an 8-bit PGM and an occupancy PGM
    Post {
        #[arg(long)]
        sar: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        occupancy: Option<PathBuf>,
        /// Truth occupancy PGM; prints the cell-wise difference
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Detect and describe keypoints; writes <image stem>.<detector>.feat
    Detect {
        #[arg(long)]
        image: PathBuf,
        /// Detector names; defaults to detect.detectors
        #[arg(long = "detector")]
        detectors: Vec<String>,
    },
    /// Match feature-set pairs and write a tab-separated report
    Match {
        /// Two feature files from the same detector; repeat for more detectors
        #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
        pair: Vec<PathBuf>,
        #[arg(long, default_value = "matches.tsv")]
        output: PathBuf,
    },
    /// Validate loop candidates from a match report
    Loopclose {
        #[arg(long)]
        reports: PathBuf,
        #[arg(long, default_value = "loops.tsv")]
        output: PathBuf,
    },
    /// Run every stage on a simulated scene
    Pipeline {
        #[arg(long)]
        scene: Option<PathBuf>,
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Print the effective configuration with every key
    Config,
}

fn load_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => {
            RunConfig::load(path).with_context(|| format!("loading config {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    for kv in &g.set {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
        cfg.set(k.trim(), v)?;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(n) = g.min_good_matches {
        cfg.set("loop.min_good_matches", &n.to_string())?;
    }
    if let Some(r) = g.ratio {
        cfg.set("match.ratio", &r.to_string())?;
    }
    if let Some(t) = g.corner_threshold {
        cfg.set("detect.corner_threshold", &t.to_string())?;
    }
    if let Some(t) = &g.occupancy_threshold {
        cfg.set("post.occupancy_threshold", t)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn resolve(out: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        out.join(p)
    }
}

fn scene_and_path(
    scene: &Option<PathBuf>,
    trajectory: &Option<PathBuf>,
) -> Result<(
    Vec<uwbsar::core::simulator::Scatterer>,
    Vec<uwbsar::core::geometry::Pose2>,
)> {
    let s = match scene {
        Some(p) => textio::load_scene(p)?,
        None => demo::scene(),
    };
    let t = match trajectory {
        Some(p) => textio::load_trajectory(p)?,
        None => demo::trajectory(),
    };
    Ok((s, t))
}

fn run(cli: Cli) -> Result<()> {
    let g = &cli.global;
    let cfg = load_config(g)?;
    let out = &g.out;
    match &cli.command {
        Command::Simulate {
            scene,
            trajectory,
            output,
            truth,
        } => {
            let (s, t) = scene_and_path(scene, trajectory)?;
            let sim = stages::simulate(&cfg, &s, &t)?;
            let mut bytes = Vec::new();
            sim.log.write_to(&mut bytes)?;
            write_output(&resolve(out, output), &bytes, g.overwrite)?;
            write_output(
                &resolve(out, truth),
                &encode_pgm(&stages::occupancy_image(&sim.truth)),
                g.overwrite,
            )?;
            println!(
                "{} records, {} samples each, grid {}x{}",
                sim.log.records.len(),
                sim.log.samples_per_record,
                sim.grid.width,
                sim.grid.height
            );
        }
        Command::Backproject {
            scans,
            first_pose,
            end_pose,
            output,
        } => {
            let log = ScanLog::load(scans)?;
            if log.records.is_empty() {
                bail!("{} contains no scan records", scans.display());
            }
            let range = match (first_pose, end_pose) {
                (None, None) => None,
                (a, b) => Some(a.unwrap_or(0)..b.unwrap_or(stages::pose_groups(&log).len())),
            };
            let sar = stages::backproject(&cfg, &log, range)?;
            write_output(
                &resolve(out, output),
                &encode_float(&FloatImage::from_sar(&sar)),
                g.overwrite,
            )?;
            println!(
                "{} scans onto {}x{} pixels",
                sar.scan_count, sar.grid.width, sar.grid.height
            );
        }
        Command::Post {
            sar,
            output,
            occupancy,
            truth,
        } => {
            let image = load_float(sar)?.into_sar()?;
            let p = stages::post(&cfg, &image)?;
            let stem = stages::region_name(sar);
            let output = output
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{stem}.pgm")));
            let occupancy = occupancy
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("{stem}.occupancy.pgm")));
            write_output(&resolve(out, &output), &encode_pgm(&p.image), g.overwrite)?;
            write_output(
                &resolve(out, &occupancy),
                &encode_pgm(&stages::occupancy_image(&p.occupancy)),
                g.overwrite,
            )?;
            println!("occupancy level {}", p.level);
            if let Some(t) = truth {
                let truth = stages::occupancy_from_image(&load_pgm(t)?);
                println!(
                    "cellwise difference {:.6}",
                    stages::map_difference(&p.occupancy, &truth)?
                );
            }
        }
        Command::Detect { image, detectors } => {
            let img = load_pgm(image)?;
            let ids: Vec<DetectorId> = if detectors.is_empty() {
                cfg.detectors.clone()
            } else {
                detectors
                    .iter()
                    .map(|n| {
                        DetectorId::parse(n).with_context(|| format!("unknown detector `{n}`"))
                    })
                    .collect::<Result<_>>()?
            };
            let stem = stages::region_name(image);
            for id in ids {
                let set = stages::detect(&cfg, &img, id)?;
                let path = resolve(out, Path::new(&format!("{stem}.{id}.feat")));
                write_output(&path, &encode_features(&set)?, g.overwrite)?;
                println!("{id}: {} keypoints -> {}", set.len(), path.display());
            }
        }
        Command::Match { pair, output } => {
            let mut rows = Vec::new();
            for p in pair.chunks(2) {
                let (a, b) = (load_features(&p[0])?, load_features(&p[1])?);
                let report = stages::match_sets(&cfg, &a, &b).with_context(|| {
                    format!("matching {} against {}", p[0].display(), p[1].display())
                })?;
                rows.push(NamedReport {
                    region_a: stages::region_name(&p[0]),
                    region_b: stages::region_name(&p[1]),
                    report,
                });
            }
            let text = format_match_reports(&rows);
            write_output(&resolve(out, output), text.as_bytes(), g.overwrite)?;
            print!("{text}");
        }
        Command::Loopclose { reports, output } => {
            let decisions = stages::loopclose(&cfg, &load_match_reports(reports)?)?;
            let text = format_decisions(&decisions);
            write_output(&resolve(out, output), text.as_bytes(), g.overwrite)?;
            print!("{text}");
        }
        Command::Pipeline { scene, trajectory } => {
            let (s, t) = scene_and_path(scene, trajectory)?;
            let result = stages::pipeline(&cfg, &s, &t, out, g.overwrite)?;
            println!("map cellwise difference {:.6}", result.map_difference);
            print!("{}", format_decisions(&result.decisions));
        }
        Command::Config => print!("{}", cfg.to_text()),
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

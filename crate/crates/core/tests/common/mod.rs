#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uwbsar_core::backprojection::{BackprojectOptions, ImageGrid, SarAccumulator, SarImage};
use uwbsar_core::geometry::{Point2, Pose2};
use uwbsar_core::image::{enhance, Gray8};
use uwbsar_core::radar::{compress, default_pulse, RadarConfig};
use uwbsar_core::simulator::{
    bins_for_config, generate_trajectory, noise_std_for_snr, render_scene, Scatterer,
    TrajectorySpec,
};

pub const RES: f64 = 0.005;

pub fn five_scatterers() -> Vec<Scatterer> {
    [(0.5, 1.6), (1.0, 1.7), (1.4, 1.5), (0.7, 0.4), (1.3, 0.5)]
        .iter()
        .map(|&(x, y)| Scatterer::new(x, y, 1.0))
        .collect()
}

pub fn random_scene(seed: u64, n: usize) -> Vec<Scatterer> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let side = if r.gen_bool(0.5) { -1.0 } else { 1.0 };
            Scatterer::new(
                r.gen_range(0.2..1.8),
                1.0 + side * r.gen_range(0.45..0.9),
                r.gen_range(0.5..2.0),
            )
        })
        .collect()
}

/// 60 poses along y = 1 m from x = 0.25 to 1.75 m, side radars, 400x400 at 5 mm.
pub fn sar_of(scene: &[Scatterer], snr_db: Option<f64>, seed: u64) -> SarImage {
    let spec = TrajectorySpec::new(
        vec![Pose2::new(0.25, 1.0, 0.0), Pose2::new(1.75, 1.0, 0.0)],
        1.5 / 59.0,
    );
    let traj = generate_trajectory(&spec).unwrap();
    let base = RadarConfig::lt102();
    let cfgs = spec.radar_configs(&base);
    let grid = ImageGrid::new(400, 400, RES, Point2::new(0.0, 0.0)).unwrap();
    let noise = snr_db.map_or(0.0, |db| noise_std_for_snr(base.pulse_amplitude_v, db));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let run = render_scene(
        scene,
        &traj,
        &cfgs,
        &grid,
        bins_for_config(&base),
        noise,
        &mut rng,
    )
    .unwrap();
    let pulse = default_pulse(&base).unwrap();
    let mut acc = SarAccumulator::new(grid, BackprojectOptions::default()).unwrap();
    for (i, s) in &run.scans {
        acc.add_scan(&compress(s, &pulse).unwrap(), &cfgs[*i])
            .unwrap();
    }
    acc.finish().unwrap()
}

pub fn gray_of(scene: &[Scatterer], seed: u64) -> Gray8 {
    enhance(&sar_of(scene, Some(20.0), seed), 1.0).unwrap().1
}

/// Shifts content by whole pixels, filling uncovered pixels with zero.
pub fn shift(img: &Gray8, dx: isize, dy: isize) -> Gray8 {
    let mut out = Gray8::filled(img.width, img.height, 0);
    for y in 0..img.height as isize {
        for x in 0..img.width as isize {
            let (sx, sy) = (x - dx, y - dy);
            if sx >= 0 && sy >= 0 && (sx as usize) < img.width && (sy as usize) < img.height {
                out.set(x as usize, y as usize, img.get(sx as usize, sy as usize));
            }
        }
    }
    out
}

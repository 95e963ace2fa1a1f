mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uwbsar_core::backprojection::{
    accumulate, backproject_scan, fov_mask, in_fov, BackprojectOptions, ImageGrid, SarAccumulator,
    SarImage,
};
use uwbsar_core::geometry::{Point2, Pose2};
use uwbsar_core::image::{
    cellwise_difference, gaussian_blur, positive_image, quantize, BinaryGrid, GrayImage,
};
use uwbsar_core::radar::{CompressedScan, RadarConfig};
use uwbsar_core::simulator::Scatterer;
use uwbsar_core::Complex64;

use common::{sar_of, RES};

fn random_scan(rng: &mut ChaCha8Rng, pose: Pose2, n: usize) -> CompressedScan {
    CompressedScan {
        bins: (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
        pose,
    }
}

fn small_grid() -> ImageGrid {
    ImageGrid::new(160, 120, 0.02, Point2::new(-1.6, -1.2)).unwrap()
}

fn side_config(left: bool) -> RadarConfig {
    RadarConfig::lt102()
        .with_mount_angle(if left { 1.0 } else { -1.0 } * std::f64::consts::FRAC_PI_2)
}

fn scans(seed: u64, n: usize) -> Vec<(CompressedScan, RadarConfig)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let pose = Pose2::new(
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-0.3..0.3),
                rng.gen_range(-3.0..3.0),
            );
            (random_scan(&mut rng, pose, 480), side_config(i % 2 == 0))
        })
        .collect()
}

#[test]
fn accumulator_equals_sum_of_partials() {
    let grid = small_grid();
    let input = scans(1, 12);
    let mut acc = SarAccumulator::new(grid, BackprojectOptions::default()).unwrap();
    let mut partials = Vec::new();
    for (s, c) in &input {
        acc.add_scan(s, c).unwrap();
        partials.push(backproject_scan(s, c, &grid, &BackprojectOptions::default()).unwrap());
    }
    let streamed = acc.finish().unwrap();
    let summed = accumulate(&partials).unwrap();
    assert_eq!(streamed.pixels, summed.pixels);
    let mut dense = vec![Complex64::new(0.0, 0.0); grid.len()];
    for p in &partials {
        for (d, v) in dense.iter_mut().zip(p.to_dense()) {
            *d += v;
        }
    }
    assert_eq!(summed.pixels, dense);
}

#[test]
fn scan_order_does_not_matter() {
    let grid = small_grid();
    let mut input = scans(2, 16);
    let build = |v: &[(CompressedScan, RadarConfig)]| -> SarImage {
        let mut acc = SarAccumulator::new(grid, BackprojectOptions::default()).unwrap();
        for (s, c) in v {
            acc.add_scan(s, c).unwrap();
        }
        acc.finish().unwrap()
    };
    let forward = build(&input);
    input.reverse();
    input.swap(3, 11);
    let shuffled = build(&input);
    for (a, b) in forward.pixels.iter().zip(&shuffled.pixels) {
        assert!((a - b).norm() <= 1e-6 * a.norm().max(1e-300) || (a - b).norm() <= 1e-12);
    }
}

#[test]
fn mask_agrees_with_predicate_off_the_boundary() {
    let grid = small_grid();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let band = grid.resolution_m * std::f64::consts::SQRT_2;
    for k in 0..4 {
        let pose = Pose2::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-3.0..3.0),
        );
        let cfg = side_config(k % 2 == 0);
        let mask = fov_mask(&pose, &cfg, &grid);
        for _ in 0..1000 {
            let (col, row) = (rng.gen_range(0..grid.width), rng.gen_range(0..grid.height));
            let p = grid.pixel_center(col, row);
            let direct = in_fov(p, &pose, &cfg);
            if mask.contains(col, row) == direct {
                continue;
            }
            // disagreement is only allowed within a pixel diagonal of the sector edge
            let near = [-band, band].iter().any(|&dx| {
                [-band, band]
                    .iter()
                    .any(|&dy| in_fov(Point2::new(p.x + dx, p.y + dy), &pose, &cfg) != direct)
            });
            assert!(
                near,
                "pixel ({col}, {row}) disagrees away from the boundary"
            );
        }
    }
}

#[test]
fn per_scan_energy_is_bounded() {
    let grid = small_grid();
    for (s, c) in scans(4, 10) {
        let part = backproject_scan(&s, &c, &grid, &BackprojectOptions::default()).unwrap();
        let mask = fov_mask(&s.pose, &c, &grid);
        let max_bin = s.bins.iter().map(|b| b.norm()).fold(0.0, f64::max);
        let energy: f64 = part.values.iter().map(|v| v.norm()).sum();
        assert!(energy <= mask.count() as f64 * max_bin * (1.0 + 1e-12));
    }
}

fn peak_offset_px(sar: &SarImage, at: (f64, f64), value: impl Fn(Complex64) -> f64) -> f64 {
    let (best, _) = sar
        .pixels
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |(bi, bv), (i, p)| {
            if value(*p) > bv {
                (i, value(*p))
            } else {
                (bi, bv)
            }
        });
    let c = sar
        .grid
        .pixel_center(best % sar.grid.width, best / sar.grid.width);
    (c.x - at.0).hypot(c.y - at.1) / RES
}

const LONE: [(f64, f64); 4] = [(1.1, 1.55), (0.5, 1.6), (0.7, 0.4), (1.0, 1.9)];

#[test]
fn single_scatterer_positive_image_peaks_on_its_pixel() {
    for at in LONE {
        let sar = sar_of(&[Scatterer::new(at.0, at.1, 1.0)], None, 0);
        let d = peak_offset_px(&sar, at, |p| p.re + p.norm());
        assert!(d <= 1.0 + 1e-9, "{at:?}: peak {d:.2} px away");
    }
}

#[test]
fn single_scatterer_magnitude_peaks_on_its_pixel() {
    for at in LONE {
        let sar = sar_of(&[Scatterer::new(at.0, at.1, 1.0)], None, 0);
        let d = peak_offset_px(&sar, at, |p| p.norm());
        assert!(d <= 1.0 + 1e-9, "{at:?}: magnitude peak {d:.2} px away");
    }
}

fn complex_pixels(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-1e3f64..1e3, -1e3f64..1e3).prop_map(|(re, im)| Complex64::new(re, im)),
        n,
    )
}

fn gray(w: usize, h: usize) -> impl Strategy<Value = GrayImage> {
    prop::collection::vec(0.0f64..100.0, w * h).prop_map(move |pixels| GrayImage {
        width: w,
        height: h,
        resolution_m: RES,
        pixels,
    })
}

fn binary(w: usize, h: usize) -> impl Strategy<Value = BinaryGrid> {
    prop::collection::vec(any::<bool>(), w * h).prop_map(move |cells| BinaryGrid {
        width: w,
        height: h,
        cells,
    })
}

proptest! {
    #[test]
    fn positive_image_is_non_negative(pixels in complex_pixels(64), reals in prop::collection::vec(0.0f64..1e3, 64)) {
        let grid = ImageGrid::new(8, 8, RES, Point2::new(0.0, 0.0)).unwrap();
        let out = positive_image(&SarImage { grid, pixels, scan_count: 1 });
        prop_assert!(out.pixels.iter().all(|&v| v >= 0.0));
        let real = positive_image(&SarImage {
            grid,
            pixels: reals.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
            scan_count: 1,
        });
        for (v, r) in real.pixels.iter().zip(&reals) {
            prop_assert_eq!(*v, 2.0 * r);
        }
    }

    #[test]
    fn blur_preserves_mass(img in gray(23, 17), sigma in 0.3f64..4.0) {
        let out = gaussian_blur(&img, sigma).unwrap();
        let (a, b) = (img.sum(), out.sum());
        prop_assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0));
    }

    #[test]
    fn quantize_is_monotone(img in gray(16, 16)) {
        let q = quantize(&img);
        let mut order: Vec<usize> = (0..img.pixels.len()).collect();
        order.sort_by(|&a, &b| img.pixels[a].total_cmp(&img.pixels[b]));
        for w in order.windows(2) {
            prop_assert!(q.pixels[w[0]] <= q.pixels[w[1]]);
        }
    }

    #[test]
    fn cellwise_difference_is_symmetric(a in binary(12, 9), b in binary(12, 9)) {
        let ab = cellwise_difference(&a, &b).unwrap();
        prop_assert_eq!(ab, cellwise_difference(&b, &a).unwrap());
        prop_assert_eq!(ab == 0.0, a == b);
        prop_assert_eq!(cellwise_difference(&a, &a).unwrap(), 0.0);
    }
}

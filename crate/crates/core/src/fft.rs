//! Discrete Fourier transforms of arbitrary length.
//!
//! Power-of-two lengths use an iterative radix-2 transform; every other
//! length goes through Bluestein's chirp-z reformulation on top of it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    /// Inverse transform, scaled by `1/n`.
    Inverse,
}

/// Transforms `data` in place. Any length is accepted; zero and one are no-ops.
pub fn transform(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        radix2(data, direction);
    } else {
        bluestein(data, direction);
    }
    if direction == Direction::Inverse {
        let scale = 1.0 / n as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }
}

/// Forward transform of a real sequence.
pub fn forward_real(samples: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    transform(&mut buf, Direction::Forward);
    buf
}

fn twiddle(k: usize, n: usize, sign: f64) -> Complex64 {
    let angle = sign * 2.0 * PI * k as f64 / n as f64;
    Complex64::new(angle.cos(), angle.sin())
}

// Unscaled in both directions.
fn radix2(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let roots: Vec<Complex64> = (0..half).map(|k| twiddle(k, len, sign)).collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let a = data[start + k];
                let b = data[start + k + half] * roots[k];
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

// Unscaled in both directions.
fn bluestein(data: &mut [Complex64], direction: Direction) {
    let n = data.len();
    let m = (2 * n - 1).next_power_of_two();
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Inverse => 1.0,
    };
    // chirp[k] = exp(sign * i * pi * k^2 / n); k^2 reduced mod 2n keeps the angle small.
    let chirp: Vec<Complex64> = (0..n)
        .map(|k| {
            let k2 = (k as u128 * k as u128 % (2 * n as u128)) as f64;
            let angle = sign * PI * k2 / n as f64;
            Complex64::new(angle.cos(), angle.sin())
        })
        .collect();

    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..n {
        a[k] = data[k] * chirp[k];
    }
    let mut b = vec![Complex64::new(0.0, 0.0); m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    radix2(&mut a, Direction::Forward);
    radix2(&mut b, Direction::Forward);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x *= *y;
    }
    radix2(&mut a, Direction::Inverse);
    let scale = 1.0 / m as f64;
    for k in 0..n {
        data[k] = a[k] * scale * chirp[k];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                        let angle = -2.0 * PI * ((j * k) % n) as f64 / n as f64;
                        acc + v * Complex64::new(angle.cos(), angle.sin())
                    })
            })
            .collect()
    }

    fn signal(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                Complex64::new(
                    (i as f64 * 0.37).sin() + 0.1 * i as f64,
                    (i as f64 * 1.3).cos(),
                )
            })
            .collect()
    }

    #[test]
    fn matches_naive_dft_for_assorted_lengths() {
        for n in [1usize, 2, 3, 5, 8, 12, 17, 64, 100, 127] {
            let x = signal(n);
            let expected = naive_dft(&x);
            let mut got = x.clone();
            transform(&mut got, Direction::Forward);
            for (g, e) in got.iter().zip(expected.iter()) {
                assert!(
                    (g - e).norm() < 1e-9 * (1.0 + e.norm()),
                    "n={n}: {g} vs {e}"
                );
            }
        }
    }

    #[test]
    fn inverse_round_trips() {
        for n in [7usize, 16, 33, 250] {
            let x = signal(n);
            let mut y = x.clone();
            transform(&mut y, Direction::Forward);
            transform(&mut y, Direction::Inverse);
            for (a, b) in x.iter().zip(y.iter()) {
                assert!((a - b).norm() < 1e-10);
            }
        }
    }
}

//! Radar parameters, transmitted pulse and range compression.
//!
//! The transmitted pulse is a Gaussian-modulated cosine whose envelope
//! spectrum falls to -6 dB at `fc * (1 +/- bw/2)`, with `bw` the fractional
//! bandwidth `bandwidth_hz / center_freq_hz`. Received echoes are compressed
//! by correlating with that pulse and then lifted to the analytic signal so
//! that back-projected pixels are complex.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::fft::{self, Direction};
use crate::geometry::Pose2;
use crate::SPEED_OF_LIGHT;
#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

/// Reference level (dB) at which the pulse's fractional bandwidth is measured.
pub const BANDWIDTH_REFERENCE_DB: f64 = -6.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RadarError {
    #[error("invalid radar configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("pulse half-duration {0} s is not positive")]
    NonPositiveDuration(f64),
    #[error("pulse half-duration {half_duration_s} s truncates the envelope at {edge_level:.3e} of peak (needs < 1e-3)")]
    PulseTruncated {
        half_duration_s: f64,
        edge_level: f64,
    },
    #[error("waveform has no samples")]
    EmptyWaveform,
    #[error("waveform contains a non-finite sample at index {0}")]
    NonFiniteSample(usize),
    #[error("sample rate mismatch: {0} Hz vs {1} Hz")]
    SampleRateMismatch(f64, f64),
    #[error("range {0} m is negative or not finite")]
    InvalidRange(f64),
    #[error("range bin {bin} is beyond the scan length of {n_bins} bins")]
    OutOfBins { bin: usize, n_bins: usize },
}

/// Pulse and antenna parameters of one radar module.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadarConfig {
    pub sample_rate_hz: f64,
    pub center_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub pulse_amplitude_v: f64,
    /// Full beamwidth of the field-of-view cone.
    pub beamwidth_rad: f64,
    pub range_min_m: f64,
    pub range_max_m: f64,
    /// Boresight direction relative to the platform heading.
    pub mount_angle_rad: f64,
}

impl RadarConfig {
    /// The LT102 module as used for side-looking SAR: 23.328 GHz sampling,
    /// 7.29 GHz centre, 2 GHz bandwidth, 1 V pulse, 60 degree beam, 0.4-3 m,
    /// mounted looking left of the direction of travel.
    pub fn lt102() -> Self {
        Self {
            sample_rate_hz: 23.328e9,
            center_freq_hz: 7.29e9,
            bandwidth_hz: 2.0e9,
            pulse_amplitude_v: 1.0,
            beamwidth_rad: 60f64.to_radians(),
            range_min_m: 0.4,
            range_max_m: 3.0,
            mount_angle_rad: PI / 2.0,
        }
    }

    pub fn with_mount_angle(mut self, mount_angle_rad: f64) -> Self {
        self.mount_angle_rad = mount_angle_rad;
        self
    }

    pub fn validate(&self) -> Result<(), RadarError> {
        let fields = [
            self.sample_rate_hz,
            self.center_freq_hz,
            self.bandwidth_hz,
            self.pulse_amplitude_v,
            self.beamwidth_rad,
            self.range_min_m,
            self.range_max_m,
            self.mount_angle_rad,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(RadarError::InvalidConfig("non-finite parameter"));
        }
        if self.center_freq_hz <= 0.0 || self.bandwidth_hz <= 0.0 {
            return Err(RadarError::InvalidConfig(
                "centre frequency and bandwidth must be positive",
            ));
        }
        if self.sample_rate_hz <= 2.0 * (self.center_freq_hz + self.bandwidth_hz / 2.0) {
            return Err(RadarError::InvalidConfig(
                "sample rate below twice the highest pulse frequency",
            ));
        }
        if !(self.range_min_m > 0.0 && self.range_min_m < self.range_max_m) {
            return Err(RadarError::InvalidConfig("need 0 < range_min < range_max"));
        }
        if !(self.beamwidth_rad > 0.0 && self.beamwidth_rad < PI) {
            return Err(RadarError::InvalidConfig("need 0 < beamwidth < pi"));
        }
        Ok(())
    }

    pub fn fractional_bandwidth(&self) -> f64 {
        self.bandwidth_hz / self.center_freq_hz
    }

    /// Coefficient `a` of the envelope `exp(-a t^2)`.
    pub fn envelope_coefficient(&self) -> f64 {
        let reference = 10f64.powf(BANDWIDTH_REFERENCE_DB / 20.0);
        let half_width = PI * self.center_freq_hz * self.fractional_bandwidth();
        -(half_width * half_width) / (4.0 * reference.ln())
    }

    /// Half-duration at which the envelope has decayed to `level` of its peak.
    pub fn envelope_cutoff(&self, level: f64) -> f64 {
        (-level.ln() / self.envelope_coefficient()).sqrt()
    }

    /// Continuous transmitted pulse `s(t)`.
    pub fn pulse_value(&self, t: f64) -> f64 {
        let a = self.envelope_coefficient();
        self.pulse_amplitude_v * (-a * t * t).exp() * (2.0 * PI * self.center_freq_hz * t).cos()
    }
}

/// Real-valued sampled signal: `samples[k]` is taken at `t0_s + k / sample_rate_hz`.
#[derive(Clone, Debug, PartialEq)]
pub struct Waveform {
    samples: Vec<f64>,
    t0_s: f64,
    sample_rate_hz: f64,
}

impl Waveform {
    pub fn new(samples: Vec<f64>, t0_s: f64, sample_rate_hz: f64) -> Result<Self, RadarError> {
        if samples.is_empty() {
            return Err(RadarError::EmptyWaveform);
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(RadarError::NonFiniteSample(i));
        }
        if !(sample_rate_hz > 0.0 && sample_rate_hz.is_finite()) || !t0_s.is_finite() {
            return Err(RadarError::InvalidConfig(
                "waveform timing must be finite with positive rate",
            ));
        }
        Ok(Self {
            samples,
            t0_s,
            sample_rate_hz,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn t0_s(&self) -> f64 {
        self.t0_s
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn time_of(&self, index: usize) -> f64 {
        self.t0_s + index as f64 / self.sample_rate_hz
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }
}

/// One raw echo series with the pose of the radar that recorded it.
/// Sample `k` corresponds to two-way delay `k / fs`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawScan {
    pub pose: Pose2,
    pub waveform: Waveform,
}

/// Range-compressed scan: `bins[k]` holds the analytic sample at range `k * dd`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressedScan {
    pub bins: Vec<Complex64>,
    pub pose: Pose2,
}

/// Samples the transmitted pulse on `[-half_duration_s, half_duration_s]`, centred on `t = 0`.
pub fn synthesize_pulse(
    config: &RadarConfig,
    half_duration_s: f64,
) -> Result<Waveform, RadarError> {
    config.validate()?;
    if !(half_duration_s > 0.0) || !half_duration_s.is_finite() {
        return Err(RadarError::NonPositiveDuration(half_duration_s));
    }
    let fs = config.sample_rate_hz;
    let half = (half_duration_s * fs + 1e-9).floor() as i64;
    let edge_t = half as f64 / fs;
    let edge_level = (-config.envelope_coefficient() * edge_t * edge_t).exp();
    if edge_level >= 1e-3 {
        return Err(RadarError::PulseTruncated {
            half_duration_s,
            edge_level,
        });
    }
    let samples = (-half..=half)
        .map(|k| config.pulse_value(k as f64 / fs))
        .collect();
    Waveform::new(samples, -half as f64 / fs, fs)
}

/// Pulse truncated where its envelope reaches -80 dB.
pub fn default_pulse(config: &RadarConfig) -> Result<Waveform, RadarError> {
    config.validate()?;
    synthesize_pulse(config, config.envelope_cutoff(1e-4))
}

/// Correlates `received` with the pulse (`h(t) = s*(-t)`), keeping the
/// received length and time axis.
///
/// An echo delayed by `tau` relative to `received`'s time origin peaks at
/// sample `round(tau * fs)`.
pub fn matched_filter(received: &Waveform, pulse: &Waveform) -> Result<Waveform, RadarError> {
    let (fr, fp) = (received.sample_rate_hz, pulse.sample_rate_hz);
    if ((fr - fp) / fr).abs() > 1e-12 {
        return Err(RadarError::SampleRateMismatch(fr, fp));
    }
    let n = received.len();
    let m = pulse.len();
    let pulse_offset = (pulse.t0_s * fp).round() as i64;

    // full linear convolution of received with the time-reversed pulse
    let size = (n + m - 1).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); size];
    let mut b = vec![Complex64::new(0.0, 0.0); size];
    for (slot, &v) in a.iter_mut().zip(received.samples.iter()) {
        *slot = Complex64::new(v, 0.0);
    }
    for (slot, &v) in b.iter_mut().zip(pulse.samples.iter().rev()) {
        *slot = Complex64::new(v, 0.0);
    }
    fft::transform(&mut a, Direction::Forward);
    fft::transform(&mut b, Direction::Forward);
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x *= *y;
    }
    fft::transform(&mut a, Direction::Inverse);

    let out = (0..n)
        .map(|i| {
            let idx = i as i64 + pulse_offset + m as i64 - 1;
            if idx >= 0 && (idx as usize) < n + m - 1 {
                a[idx as usize].re
            } else {
                0.0
            }
        })
        .collect();
    Waveform::new(out, received.t0_s, fr)
}

/// Analytic signal of a real sequence by zeroing negative frequencies.
///
/// The real part of the result is the input itself.
pub fn analytic_signal(samples: &[f64]) -> Vec<Complex64> {
    let n = samples.len();
    if n == 0 {
        return Vec::new();
    }
    let mut spec = fft::forward_real(samples);
    // keep DC (and Nyquist for even n), double positive, drop negative
    let positive_end = n.div_ceil(2);
    for (k, v) in spec.iter_mut().enumerate() {
        if k == 0 || (n.is_multiple_of(2) && k == n / 2) {
            continue;
        }
        if k < positive_end {
            *v *= 2.0;
        } else {
            *v = Complex64::new(0.0, 0.0);
        }
    }
    fft::transform(&mut spec, Direction::Inverse);
    spec.iter()
        .zip(samples.iter())
        .map(|(z, &x)| Complex64::new(x, z.im))
        .collect()
}

/// One-way range spanned by one sample: `c / (2 fs)`.
pub fn range_bin_spacing(config: &RadarConfig) -> f64 {
    SPEED_OF_LIGHT / (2.0 * config.sample_rate_hz)
}

/// Nearest range bin for a one-way range.
pub fn range_to_bin(range_m: f64, config: &RadarConfig) -> Result<usize, RadarError> {
    if !(range_m >= 0.0) || !range_m.is_finite() {
        return Err(RadarError::InvalidRange(range_m));
    }
    Ok((range_m / range_bin_spacing(config)).round() as usize)
}

/// As [`range_to_bin`], rejecting bins at or past `n_bins`.
pub fn range_to_bin_checked(
    range_m: f64,
    config: &RadarConfig,
    n_bins: usize,
) -> Result<usize, RadarError> {
    let bin = range_to_bin(range_m, config)?;
    if bin >= n_bins {
        return Err(RadarError::OutOfBins { bin, n_bins });
    }
    Ok(bin)
}

/// Matched filter followed by analytic conversion.
pub fn compress(scan: &RawScan, pulse: &Waveform) -> Result<CompressedScan, RadarError> {
    let filtered = matched_filter(&scan.waveform, pulse)?;
    Ok(CompressedScan {
        bins: analytic_signal(filtered.samples()),
        pose: scan.pose,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn cfg() -> RadarConfig {
        RadarConfig::lt102()
    }

    // direct cross-correlation y[n] = sum_j r[n + off + j] s[j]
    fn direct_correlation(received: &Waveform, pulse: &Waveform) -> Vec<f64> {
        let off = (pulse.t0_s() * pulse.sample_rate_hz()).round() as i64;
        let r = received.samples();
        (0..r.len() as i64)
            .map(|n| {
                pulse
                    .samples()
                    .iter()
                    .enumerate()
                    .filter_map(|(j, s)| {
                        let idx = n + off + j as i64;
                        (idx >= 0 && (idx as usize) < r.len()).then(|| r[idx as usize] * s)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn lt102_is_valid() {
        cfg().validate().unwrap();
    }

    #[test]
    fn rejects_undersampled_config() {
        let mut c = cfg();
        c.sample_rate_hz = 16.0e9;
        assert!(matches!(c.validate(), Err(RadarError::InvalidConfig(_))));
        let mut c = cfg();
        c.range_min_m = 3.5;
        assert!(c.validate().is_err());
        let mut c = cfg();
        c.beamwidth_rad = PI;
        assert!(c.validate().is_err());
    }

    #[test]
    fn pulse_peak_and_symmetry() {
        let p = default_pulse(&cfg()).unwrap();
        let mid = p.len() / 2;
        assert_eq!(p.samples()[mid], 1.0);
        assert!(p.time_of(mid).abs() < 1e-18);
        for k in 0..mid {
            assert_eq!(p.samples()[k], p.samples()[p.len() - 1 - k]);
        }
    }

    #[test]
    fn pulse_duration_errors() {
        assert!(matches!(
            synthesize_pulse(&cfg(), 0.0),
            Err(RadarError::NonPositiveDuration(_))
        ));
        assert!(matches!(
            synthesize_pulse(&cfg(), -1e-9),
            Err(RadarError::NonPositiveDuration(_))
        ));
        assert!(matches!(
            synthesize_pulse(&cfg(), 1e-10),
            Err(RadarError::PulseTruncated { .. })
        ));
        let mut bad = cfg();
        bad.bandwidth_hz = -1.0;
        assert!(synthesize_pulse(&bad, 1e-9).is_err());
    }

    #[test]
    fn matched_filter_autocorrelation_peak() {
        let p = default_pulse(&cfg()).unwrap();
        let y = matched_filter(&p, &p).unwrap();
        let (imax, vmax) = y
            .samples()
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
        assert_eq!(imax, p.len() / 2);
        assert!((vmax - p.energy()).abs() < 1e-12 * p.energy());
    }

    #[test]
    fn matched_filter_delay_100_samples() {
        let c = cfg();
        let p = default_pulse(&c).unwrap();
        let fs = c.sample_rate_hz;
        let samples: Vec<f64> = (0..400)
            .map(|k| c.pulse_value((k as f64 - 100.0) / fs))
            .collect();
        let r = Waveform::new(samples, 0.0, fs).unwrap();
        let y = matched_filter(&r, &p).unwrap();
        let oracle = direct_correlation(&r, &p);
        for (a, b) in y.samples().iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-9);
        }
        let imax = oracle
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            )
            .0;
        assert_eq!(imax, 100);
        let jmax = y
            .samples()
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            )
            .0;
        assert_eq!(jmax, 100);
    }

    #[test]
    fn matched_filter_of_zeros_is_zero() {
        let p = default_pulse(&cfg()).unwrap();
        let r = Waveform::new(vec![0.0; 64], 0.0, p.sample_rate_hz()).unwrap();
        assert!(matched_filter(&r, &p)
            .unwrap()
            .samples()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn matched_filter_rate_mismatch() {
        let p = default_pulse(&cfg()).unwrap();
        let r = Waveform::new(vec![1.0; 8], 0.0, 1e9).unwrap();
        assert!(matches!(
            matched_filter(&r, &p),
            Err(RadarError::SampleRateMismatch(..))
        ));
    }

    #[test]
    fn analytic_of_cosine_has_unit_envelope() {
        let n = 512;
        let f = 37.0 / n as f64;
        let x: Vec<f64> = (0..n).map(|k| (2.0 * PI * f * k as f64).cos()).collect();
        let z = analytic_signal(&x);
        for (k, v) in z.iter().enumerate() {
            assert_eq!(v.re, x[k]);
            if k > 8 && k < n - 8 {
                assert!((v.norm() - 1.0).abs() < 1e-2);
            }
        }
        // off-grid frequency, odd length
        let n = 501;
        let x: Vec<f64> = (0..n)
            .map(|k| (2.0 * PI * 0.1234 * k as f64).cos())
            .collect();
        let z = analytic_signal(&x);
        for v in &z[50..n - 50] {
            assert!((v.norm() - 1.0).abs() < 1e-2, "{}", v.norm());
        }
    }

    #[test]
    fn analytic_has_no_negative_frequencies() {
        let x: Vec<f64> = (0..100).map(|k| ((k * k) as f64 * 0.01).sin()).collect();
        let mut z = analytic_signal(&x);
        fft::transform(&mut z, Direction::Forward);
        for v in &z[51..] {
            assert!(v.norm() < 1e-9);
        }
        assert!(analytic_signal(&[0.0; 16]).iter().all(|v| v.norm() == 0.0));
        assert!(analytic_signal(&[]).is_empty());
    }

    #[test]
    fn bin_spacing_and_index() {
        let c = cfg();
        let dd = range_bin_spacing(&c);
        assert!((dd * 1e3 - 6.4256).abs() < 1e-4);
        assert!((dd * 2.0 * c.sample_rate_hz - SPEED_OF_LIGHT).abs() <= 1e-12 * SPEED_OF_LIGHT);
        let mut unit = c;
        unit.sample_rate_hz = SPEED_OF_LIGHT / 2.0;
        assert_eq!(range_bin_spacing(&unit), 1.0);
        let mut double = c;
        double.sample_rate_hz *= 2.0;
        assert_eq!(range_bin_spacing(&double), dd / 2.0);

        assert_eq!(range_to_bin(0.0, &c).unwrap(), 0);
        assert_eq!(range_to_bin(dd, &c).unwrap(), 1);
        assert_eq!(range_to_bin(1.0, &c).unwrap(), 156);
        assert!(matches!(
            range_to_bin(-0.1, &c),
            Err(RadarError::InvalidRange(_))
        ));
        assert!(matches!(
            range_to_bin(f64::NAN, &c),
            Err(RadarError::InvalidRange(_))
        ));
        assert!(matches!(
            range_to_bin_checked(1.0, &c, 100),
            Err(RadarError::OutOfBins {
                bin: 156,
                n_bins: 100
            })
        ));
    }

    #[test]
    fn waveform_rejects_bad_samples() {
        assert!(matches!(
            Waveform::new(vec![], 0.0, 1.0),
            Err(RadarError::EmptyWaveform)
        ));
        assert!(matches!(
            Waveform::new(vec![0.0, f64::INFINITY], 0.0, 1.0),
            Err(RadarError::NonFiniteSample(1))
        ));
    }
}

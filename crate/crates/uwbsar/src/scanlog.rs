//! Pose-stamped raw radar recordings.
//!
//! A scan log is an ASCII header of `key=value` lines closed by an empty line,
//! followed by fixed-size little-endian records:
//!
//! ```text
//! timestamp_s   f64
//! radar_index   u32
//! x, y, theta   f64 x 3
//! samples       f32 x samples_per_record
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use uwbsar_core::geometry::Pose2;
use uwbsar_core::radar::{RadarConfig, RawScan, Waveform};

use crate::{io_at, Error, Result};

pub const FORMAT_NAME: &str = "uwbsar-scanlog";
pub const FORMAT_VERSION: u32 = 1;

const MAX_HEADER_BYTES: usize = 64 * 1024;
const RECORD_FIXED_BYTES: usize = 8 + 4 + 3 * 8;

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub timestamp_s: f64,
    pub radar_index: u32,
    pub pose: Pose2,
    pub samples: Vec<f32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanLog {
    /// Shared radar parameters; the mount angle is taken from `mount_angles`.
    pub config: RadarConfig,
    /// Boresight of each radar relative to the platform heading.
    pub mount_angles: Vec<f64>,
    pub samples_per_record: usize,
    pub records: Vec<ScanRecord>,
}

impl ScanLog {
    pub fn new(mut config: RadarConfig, mount_angles: Vec<f64>, samples_per_record: usize) -> Self {
        config.mount_angle_rad = mount_angles.first().copied().unwrap_or(0.0);
        Self {
            config,
            mount_angles,
            samples_per_record,
            records: Vec::new(),
        }
    }

    pub fn radar_count(&self) -> usize {
        self.mount_angles.len()
    }

    /// Full configuration of radar `index`.
    pub fn radar_config(&self, index: usize) -> Option<RadarConfig> {
        self.mount_angles
            .get(index)
            .map(|&a| self.config.with_mount_angle(a))
    }

    pub fn record_bytes(&self) -> usize {
        RECORD_FIXED_BYTES + 4 * self.samples_per_record
    }

    /// Appends a raw scan, narrowing its samples to `f32`.
    pub fn push_scan(
        &mut self,
        timestamp_s: f64,
        radar_index: usize,
        scan: &RawScan,
    ) -> Result<()> {
        let record = ScanRecord {
            timestamp_s,
            radar_index: radar_index as u32,
            pose: scan.pose,
            samples: scan.waveform.samples().iter().map(|&v| v as f32).collect(),
        };
        self.check_record(self.records.len(), &record)?;
        self.records.push(record);
        Ok(())
    }

    /// Record `index` as a raw scan sampled from zero delay.
    pub fn raw_scan(&self, index: usize) -> Result<RawScan> {
        let r = self.records.get(index).ok_or_else(|| Error::Record {
            index,
            message: format!("log has only {} records", self.records.len()),
        })?;
        let samples = r.samples.iter().map(|&v| v as f64).collect();
        Ok(RawScan {
            pose: r.pose,
            waveform: Waveform::new(samples, 0.0, self.config.sample_rate_hz)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.mount_angles.is_empty() {
            return Err(Error::Header("radar_count must be at least 1".into()));
        }
        if self.samples_per_record == 0 {
            return Err(Error::Header(
                "samples_per_record must be at least 1".into(),
            ));
        }
        for i in 0..self.radar_count() {
            self.radar_config(i).expect("index in range").validate()?;
        }
        for (i, r) in self.records.iter().enumerate() {
            self.check_record(i, r)?;
        }
        Ok(())
    }

    fn check_record(&self, index: usize, r: &ScanRecord) -> Result<()> {
        let fail = |message: String| Err(Error::Record { index, message });
        if !r.timestamp_s.is_finite() {
            return fail(format!("timestamp {} is not finite", r.timestamp_s));
        }
        if !r.pose.is_finite() {
            return fail(format!(
                "pose ({}, {}, {}) is not finite",
                r.pose.x, r.pose.y, r.pose.theta
            ));
        }
        if r.radar_index as usize >= self.radar_count() {
            return fail(format!(
                "radar index {} but the log has {} radars",
                r.radar_index,
                self.radar_count()
            ));
        }
        if r.samples.len() != self.samples_per_record {
            return fail(format!(
                "{} samples, expected {}",
                r.samples.len(),
                self.samples_per_record
            ));
        }
        if let Some(k) = r.samples.iter().position(|v| !v.is_finite()) {
            return fail(format!("sample {k} is not finite"));
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        self.validate()?;
        let c = &self.config;
        let mut header = format!(
            "format={FORMAT_NAME}\nversion={FORMAT_VERSION}\n\
             sample_rate_hz={}\ncenter_freq_hz={}\nbandwidth_hz={}\npulse_amplitude_v={}\n\
             beamwidth_rad={}\nrange_min_m={}\nrange_max_m={}\nradar_count={}\n",
            c.sample_rate_hz,
            c.center_freq_hz,
            c.bandwidth_hz,
            c.pulse_amplitude_v,
            c.beamwidth_rad,
            c.range_min_m,
            c.range_max_m,
            self.radar_count()
        );
        for (i, a) in self.mount_angles.iter().enumerate() {
            header.push_str(&format!("mount_angle_rad.{i}={a}\n"));
        }
        header.push_str(&format!(
            "samples_per_record={}\n\n",
            self.samples_per_record
        ));
        w.write_all(header.as_bytes())?;

        let mut buf = Vec::with_capacity(self.record_bytes());
        for r in &self.records {
            buf.clear();
            buf.extend_from_slice(&r.timestamp_s.to_le_bytes());
            buf.extend_from_slice(&r.radar_index.to_le_bytes());
            for v in [r.pose.x, r.pose.y, r.pose.theta] {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            for v in &r.samples {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self> {
        let mut reader = BufReader::new(r);
        let header = read_header(&mut reader)?;
        let mut log = parse_header(&header)?;

        let mut payload = Vec::new();
        reader.read_to_end(&mut payload)?;
        let size = log.record_bytes();
        let complete = payload.len() / size;
        let rest = payload.len() % size;
        for (index, chunk) in payload.chunks_exact(size).enumerate() {
            let f64_at =
                |o: usize| f64::from_le_bytes(chunk[o..o + 8].try_into().expect("8 bytes"));
            let record = ScanRecord {
                timestamp_s: f64_at(0),
                radar_index: u32::from_le_bytes(chunk[8..12].try_into().expect("4 bytes")),
                // stored theta is kept verbatim so that saving reproduces the file
                pose: Pose2 {
                    x: f64_at(12),
                    y: f64_at(20),
                    theta: f64_at(28),
                },
                samples: chunk[RECORD_FIXED_BYTES..]
                    .chunks_exact(4)
                    .map(|b| f32::from_le_bytes(b.try_into().expect("4 bytes")))
                    .collect(),
            };
            log.check_record(index, &record)?;
            log.records.push(record);
        }
        if rest != 0 {
            return Err(Error::Record {
                index: complete,
                message: format!("truncated: {rest} of {size} bytes present"),
            });
        }
        Ok(log)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).map_err(io_at(path))?;
        Self::read_from(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::new();
        self.write_to(&mut bytes)?;
        fs::write(path, bytes).map_err(io_at(path))
    }
}

fn read_header<R: BufRead>(reader: &mut R) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    let mut total = 0;
    loop {
        let mut raw = Vec::new();
        let n = reader.read_until(b'\n', &mut raw)?;
        if n == 0 {
            return Err(Error::Header("missing blank line after header".into()));
        }
        total += n;
        if total > MAX_HEADER_BYTES {
            return Err(Error::Header("header exceeds 64 KiB".into()));
        }
        let line =
            String::from_utf8(raw).map_err(|_| Error::Header("header is not UTF-8".into()))?;
        let line = line.trim_end_matches('\n').trim_end_matches('\r');
        if line.is_empty() {
            return Ok(lines);
        }
        lines.push(line.to_string());
    }
}

fn parse_header(lines: &[String]) -> Result<ScanLog> {
    let mut map = BTreeMap::new();
    for line in lines {
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Header(format!("expected key=value, got `{line}`")))?;
        if map
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            return Err(Error::Header(format!("duplicate key `{}`", k.trim())));
        }
    }
    let mut take = |key: &str| {
        map.remove(key)
            .ok_or_else(|| Error::Header(format!("missing key `{key}`")))
    };
    let format = take("format")?;
    if format != FORMAT_NAME {
        return Err(Error::Header(format!(
            "format `{format}` is not {FORMAT_NAME}"
        )));
    }
    let version: u32 = parse_value("version", &take("version")?)?;
    if version != FORMAT_VERSION {
        return Err(Error::Header(format!("unsupported version {version}")));
    }
    let config = RadarConfig {
        sample_rate_hz: parse_value("sample_rate_hz", &take("sample_rate_hz")?)?,
        center_freq_hz: parse_value("center_freq_hz", &take("center_freq_hz")?)?,
        bandwidth_hz: parse_value("bandwidth_hz", &take("bandwidth_hz")?)?,
        pulse_amplitude_v: parse_value("pulse_amplitude_v", &take("pulse_amplitude_v")?)?,
        beamwidth_rad: parse_value("beamwidth_rad", &take("beamwidth_rad")?)?,
        range_min_m: parse_value("range_min_m", &take("range_min_m")?)?,
        range_max_m: parse_value("range_max_m", &take("range_max_m")?)?,
        mount_angle_rad: 0.0,
    };
    let radar_count: usize = parse_value("radar_count", &take("radar_count")?)?;
    let mut mount_angles = Vec::with_capacity(radar_count);
    for i in 0..radar_count {
        let key = format!("mount_angle_rad.{i}");
        mount_angles.push(parse_value(&key, &take(&key)?)?);
    }
    let samples_per_record = parse_value("samples_per_record", &take("samples_per_record")?)?;
    if let Some(key) = map.keys().next() {
        return Err(Error::Header(format!("unknown key `{key}`")));
    }
    let log = ScanLog::new(config, mount_angles, samples_per_record);
    log.validate()?;
    Ok(log)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Header(format!("`{key}` has unparsable value `{value}`")))
}

//! Whitespace-separated scene and trajectory tables.
//!
//! Scene: one scatterer per line, `x_m y_m rcs`. Trajectory: one waypoint per
//! line, `x_m y_m theta_rad`. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use uwbsar_core::geometry::Pose2;
use uwbsar_core::simulator::Scatterer;

use crate::{io_at, Error, Result};

fn rows<'a>(
    what: &'static str,
    text: &'a str,
) -> impl Iterator<Item = Result<(usize, [f64; 3])>> + 'a {
    text.lines().enumerate().filter_map(move |(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            return None;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let err = |message: String| Error::Parse {
            what,
            line: i + 1,
            message,
        };
        if fields.len() != 3 {
            return Some(Err(err(format!(
                "expected 3 columns, found {}",
                fields.len()
            ))));
        }
        let mut v = [0.0; 3];
        for (slot, f) in v.iter_mut().zip(&fields) {
            match f.parse::<f64>() {
                Ok(x) if x.is_finite() => *slot = x,
                _ => return Some(Err(err(format!("`{f}` is not a finite number")))),
            }
        }
        Some(Ok((i + 1, v)))
    })
}

pub fn parse_scene(text: &str) -> Result<Vec<Scatterer>> {
    rows("scene", text)
        .map(|r| {
            let (line, [x, y, rcs]) = r?;
            if rcs < 0.0 {
                return Err(Error::Parse {
                    what: "scene",
                    line,
                    message: format!("negative rcs {rcs}"),
                });
            }
            Ok(Scatterer::new(x, y, rcs))
        })
        .collect()
}

pub fn parse_trajectory(text: &str) -> Result<Vec<Pose2>> {
    rows("trajectory", text)
        .map(|r| r.map(|(_, [x, y, theta])| Pose2::new(x, y, theta)))
        .collect()
}

pub fn format_scene(scene: &[Scatterer]) -> String {
    let mut s = String::from("# x_m y_m rcs\n");
    for sc in scene {
        let _ = writeln!(s, "{} {} {}", sc.position.x, sc.position.y, sc.rcs);
    }
    s
}

pub fn format_trajectory(waypoints: &[Pose2]) -> String {
    let mut s = String::from("# x_m y_m theta_rad\n");
    for p in waypoints {
        let _ = writeln!(s, "{} {} {}", p.x, p.y, p.theta);
    }
    s
}

pub fn load_scene(path: &Path) -> Result<Vec<Scatterer>> {
    parse_scene(&fs::read_to_string(path).map_err(io_at(path))?)
}

pub fn load_trajectory(path: &Path) -> Result<Vec<Pose2>> {
    parse_trajectory(&fs::read_to_string(path).map_err(io_at(path))?)
}

//! Tab-separated match reports and loop decisions.
//!
//! Translations are written in millimetres and rotations in degrees; a
//! missing transform is written as `-` in each of its four columns.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use uwbsar_core::features::DetectorId;
use uwbsar_core::loopclose::{LoopDecision, MatchReport, SimilarityTransform};

use crate::{io_at, Error, Result};

pub const MATCH_HEADER: &str =
    "region_a\tregion_b\tdetector\tkeypoints_a\tkeypoints_b\ttotal_matches\tgood_matches\tgood_fraction\tscale\ttx_mm\tty_mm\trot_deg";
pub const DECISION_HEADER: &str =
    "region_a\tregion_b\taccepted\tscale\ttx_mm\tty_mm\trot_deg\treasons";

/// A match report with the names of the two regions it compares.
#[derive(Clone, Debug, PartialEq)]
pub struct NamedReport {
    pub region_a: String,
    pub region_b: String,
    pub report: MatchReport,
}

// nine decimals, trailing zeros trimmed
fn num(v: f64) -> String {
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn transform_cols(t: &Option<SimilarityTransform>) -> String {
    match t {
        Some(t) => format!(
            "{}\t{}\t{}\t{}",
            num(t.scale),
            num(t.tx_mm()),
            num(t.ty_mm()),
            num(t.rot_deg())
        ),
        None => "-\t-\t-\t-".into(),
    }
}

pub fn format_match_reports(rows: &[NamedReport]) -> String {
    let mut s = String::from(MATCH_HEADER);
    s.push('\n');
    for r in rows {
        let m = &r.report;
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.4}\t{}",
            r.region_a,
            r.region_b,
            m.detector,
            m.keypoints_a,
            m.keypoints_b,
            m.total_matches,
            m.good_matches,
            m.good_fraction(),
            transform_cols(&m.transform)
        );
    }
    s
}

fn field<T: std::str::FromStr>(line: usize, name: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Parse {
        what: "match report",
        line,
        message: format!("column {name}: cannot parse `{v}`"),
    })
}

pub fn parse_match_reports(text: &str) -> Result<Vec<NamedReport>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == MATCH_HEADER => {}
        _ => {
            return Err(Error::Parse {
                what: "match report",
                line: 1,
                message: "missing or unexpected header".into(),
            })
        }
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        let n = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let c: Vec<&str> = line.split('\t').collect();
        if c.len() != 12 {
            return Err(Error::Parse {
                what: "match report",
                line: n,
                message: format!("expected 12 columns, found {}", c.len()),
            });
        }
        let detector = DetectorId::parse(c[2]).ok_or_else(|| Error::Parse {
            what: "match report",
            line: n,
            message: format!("unknown detector `{}`", c[2]),
        })?;
        let transform = if c[8..12].iter().all(|v| *v == "-") {
            None
        } else {
            Some(SimilarityTransform::from_mm_deg(
                field(n, "scale", c[8])?,
                field(n, "tx_mm", c[9])?,
                field(n, "ty_mm", c[10])?,
                field(n, "rot_deg", c[11])?,
            ))
        };
        out.push(NamedReport {
            region_a: c[0].to_string(),
            region_b: c[1].to_string(),
            report: MatchReport {
                detector,
                keypoints_a: field(n, "keypoints_a", c[3])?,
                keypoints_b: field(n, "keypoints_b", c[4])?,
                total_matches: field(n, "total_matches", c[5])?,
                good_matches: field(n, "good_matches", c[6])?,
                transform,
            },
        });
    }
    Ok(out)
}

pub fn format_decisions(rows: &[(String, String, LoopDecision)]) -> String {
    let mut s = String::from(DECISION_HEADER);
    s.push('\n');
    for (a, b, d) in rows {
        let reasons = if d.reasons.is_empty() {
            "-".to_string()
        } else {
            d.reasons
                .iter()
                .map(|r| r.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(
            s,
            "{a}\t{b}\t{}\t{}\t{reasons}",
            if d.accepted { "yes" } else { "no" },
            transform_cols(&d.fused_transform)
        );
    }
    s
}

pub fn load_match_reports(path: &Path) -> Result<Vec<NamedReport>> {
    parse_match_reports(&fs::read_to_string(path).map_err(io_at(path))?)
}

//! Per-frame results CSV.
//!
//! ```text
//! frame,x,y,w,h,center_error,winner_likelihood,bag_size
//! 1,42.000000,30.000000,40.000000,40.000000,1.414214,3.521000,1
//! # mean_error=1.414214
//! # seed=7
//! # config=N=100;n=3;...
//! # config_digest=0123456789abcdef
//! ```
//!
//! `center_error` is empty on frames without ground truth and the
//! `mean_error` footer is omitted when no frame has any.

use std::fmt::Write as _;
use std::path::Path;

use bagtrack_core::{BBox, FrameResult, TrackerConfig};
use sha2::{Digest, Sha256};

use crate::config::config_pairs;
use crate::error::{Error, Result};
use crate::ground_truth::GroundTruth;
use crate::metrics::{center_error, mean};

pub const HEADER: &str = "frame,x,y,w,h,center_error,winner_likelihood,bag_size";

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub frame: usize,
    pub bbox: BBox,
    pub center_error: Option<f64>,
    pub winner_likelihood: f64,
    pub bag_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub rows: Vec<ReportRow>,
    pub mean_error: Option<f64>,
    pub config: TrackerConfig,
    pub seed: u64,
}

impl RunReport {
    pub fn new(results: &[FrameResult], gt: Option<&GroundTruth>, config: &TrackerConfig) -> Self {
        let rows: Vec<ReportRow> = results
            .iter()
            .map(|r| ReportRow {
                frame: r.frame_index,
                bbox: r.bbox,
                center_error: gt
                    .and_then(|g| g.get(&r.frame_index))
                    .map(|truth| center_error(&r.bbox, truth)),
                winner_likelihood: r.winner_likelihood,
                bag_size: r.bag_size,
            })
            .collect();
        let errors = center_errors(&rows);
        Self {
            mean_error: mean(&errors),
            rows,
            config: config.clone(),
            seed: config.seed,
        }
    }

    /// Center errors of the annotated frames, in frame order.
    pub fn center_errors(&self) -> Vec<f64> {
        center_errors(&self.rows)
    }

    /// Mean center error over annotated frames in `range` (inclusive frame
    /// indices).
    pub fn mean_error_between(&self, first: usize, last: usize) -> Option<f64> {
        let errs: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| (first..=last).contains(&r.frame))
            .filter_map(|r| r.center_error)
            .collect();
        mean(&errs)
    }
}

fn center_errors(rows: &[ReportRow]) -> Vec<f64> {
    rows.iter().filter_map(|r| r.center_error).collect()
}

/// `key=value;...` echo of the config used in the footer.
pub fn config_echo(cfg: &TrackerConfig) -> String {
    config_pairs(cfg)
        .into_iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// First 16 hex digits of the SHA-256 of [`config_echo`].
pub fn config_digest(cfg: &TrackerConfig) -> String {
    let hash = Sha256::digest(config_echo(cfg).as_bytes());
    hash.iter().take(8).fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn format_report(report: &RunReport) -> String {
    let mut out = String::with_capacity(64 * (report.rows.len() + 4));
    out.push_str(HEADER);
    out.push('\n');
    for r in &report.rows {
        let ce = r.center_error.map(|e| format!("{e:.6}")).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{},{:.6},{}",
            r.frame, r.bbox.x, r.bbox.y, r.bbox.w, r.bbox.h, ce, r.winner_likelihood, r.bag_size
        );
    }
    if let Some(m) = report.mean_error {
        let _ = writeln!(out, "# mean_error={m:.6}");
    }
    let _ = writeln!(out, "# seed={}", report.seed);
    let _ = writeln!(out, "# config={}", config_echo(&report.config));
    let _ = writeln!(out, "# config_digest={}", config_digest(&report.config));
    out
}

pub fn write_report(report: &RunReport, path: &Path) -> Result<()> {
    std::fs::write(path, format_report(report)).map_err(|e| Error::io(path, e))
}

/// Rows and footer values read back from a results CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedReport {
    pub rows: Vec<ReportRow>,
    pub mean_error: Option<f64>,
    pub seed: Option<u64>,
}

pub fn parse_report(text: &str, origin: &Path) -> Result<ParsedReport> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == HEADER => {}
        _ => return Err(Error::parse(origin, 1, "missing results header")),
    }
    let mut parsed = ParsedReport {
        rows: Vec::new(),
        mean_error: None,
        seed: None,
    };
    for (i, line) in lines {
        let n = i + 1;
        if let Some(footer) = line.strip_prefix('#') {
            if let Some((k, v)) = footer.trim().split_once('=') {
                match k {
                    "mean_error" => {
                        parsed.mean_error =
                            Some(v.parse().map_err(|_| Error::parse(origin, n, "bad mean_error"))?)
                    }
                    "seed" => {
                        parsed.seed = Some(v.parse().map_err(|_| Error::parse(origin, n, "bad seed"))?)
                    }
                    _ => {}
                }
            }
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 8 {
            return Err(Error::parse(origin, n, format!("expected 8 fields, got {}", f.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::parse(origin, n, format!("bad number `{s}`")))
        };
        parsed.rows.push(ReportRow {
            frame: f[0].parse().map_err(|_| Error::parse(origin, n, "bad frame"))?,
            bbox: BBox::new(num(f[1])?, num(f[2])?, num(f[3])?, num(f[4])?),
            center_error: if f[5].is_empty() { None } else { Some(num(f[5])?) },
            winner_likelihood: num(f[6])?,
            bag_size: f[7].parse().map_err(|_| Error::parse(origin, n, "bad bag size"))?,
        });
    }
    Ok(parsed)
}

pub fn read_report(path: &Path) -> Result<ParsedReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_report(&text, path)
}

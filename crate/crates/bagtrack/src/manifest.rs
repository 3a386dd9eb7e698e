//! `sequence.txt`: what a sequence directory contains.
//!
//! ```text
//! frames = *.pgm
//! width = 320
//! height = 240
//! init = 40,100,40,40
//! gt = gt.csv
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bagtrack_core::BBox;

use crate::error::{Error, Result};
use crate::frames::list_frames;
use crate::ground_truth::{load_ground_truth, GroundTruth};

pub const MANIFEST_FILE: &str = "sequence.txt";
const GT_FILE: &str = "gt.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceManifest {
    pub frame_paths: Vec<PathBuf>,
    pub width: usize,
    pub height: usize,
    pub init_bbox: BBox,
    pub gt: Option<GroundTruth>,
}

impl SequenceManifest {
    pub fn validate(&self, origin: &Path) -> Result<()> {
        if self.frame_paths.len() < 2 {
            return Err(Error::format(origin, "a sequence needs at least 2 frames"));
        }
        let b = self.init_bbox;
        if b.x < 0.0
            || b.y < 0.0
            || b.w <= 0.0
            || b.h <= 0.0
            || b.x + b.w > self.width as f64
            || b.y + b.h > self.height as f64
        {
            return Err(Error::format(origin, "initial box is not inside frame 0"));
        }
        if let Some(gt) = &self.gt {
            if let Some((&last, _)) = gt.last_key_value() {
                if last >= self.frame_paths.len() {
                    return Err(Error::format(
                        origin,
                        format!("ground truth references frame {last} past the sequence end"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Writes `sequence.txt` into `dir`; ground truth is referenced as `gt.csv`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let b = self.init_bbox;
        let mut text = String::new();
        let _ = writeln!(text, "frames = *.pgm");
        let _ = writeln!(text, "width = {}", self.width);
        let _ = writeln!(text, "height = {}", self.height);
        let _ = writeln!(text, "init = {},{},{},{}", b.x, b.y, b.w, b.h);
        if self.gt.is_some() {
            let _ = writeln!(text, "gt = {GT_FILE}");
        }
        let path = dir.join(MANIFEST_FILE);
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }

    /// Reads `dir/sequence.txt` and resolves the frame list and ground truth.
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let mut pattern = "*.pgm".to_owned();
        let (mut width, mut height, mut init, mut gt_file) = (None, None, None, None);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::parse(&path, i + 1, "expected `key = value`"));
            };
            let (k, v) = (k.trim(), v.trim());
            let bad = |what: &str| Error::parse(&path, i + 1, format!("bad {what} `{v}`"));
            match k {
                "frames" => pattern = v.to_owned(),
                "width" => width = Some(v.parse().map_err(|_| bad("width"))?),
                "height" => height = Some(v.parse().map_err(|_| bad("height"))?),
                "init" => init = Some(parse_bbox(v).ok_or_else(|| bad("box"))?),
                "gt" => gt_file = Some(dir.join(v)),
                _ => return Err(Error::parse(&path, i + 1, format!("unknown key `{k}`"))),
            }
        }
        let missing = |k: &str| Error::format(&path, format!("missing `{k}`"));
        let manifest = Self {
            frame_paths: list_frames(dir, &pattern)?,
            width: width.ok_or_else(|| missing("width"))?,
            height: height.ok_or_else(|| missing("height"))?,
            init_bbox: init.ok_or_else(|| missing("init"))?,
            gt: gt_file.map(|p| load_ground_truth(&p)).transpose()?,
        };
        manifest.validate(&path)?;
        Ok(manifest)
    }
}

/// Parses `x,y,w,h`.
pub fn parse_bbox(s: &str) -> Option<BBox> {
    let v: Vec<f64> = s
        .split(',')
        .map(|f| f.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .ok()?;
    match v[..] {
        [x, y, w, h] if v.iter().all(|f| f.is_finite()) => Some(BBox::new(x, y, w, h)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bbox_parsing() {
        assert_eq!(parse_bbox("1,2,3,4"), Some(BBox::new(1.0, 2.0, 3.0, 4.0)));
        assert_eq!(parse_bbox("1, 2.5,3,4"), Some(BBox::new(1.0, 2.5, 3.0, 4.0)));
        assert_eq!(parse_bbox("1,2,3"), None);
        assert_eq!(parse_bbox("a,2,3,4"), None);
    }
}

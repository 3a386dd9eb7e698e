//! Ground-truth boxes: one `frame_index,x,y,w,h` record per line, integer
//! fields, `#` lines ignored. Indices may be sparse.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use bagtrack_core::BBox;

use crate::error::{Error, Result};

pub type GroundTruth = BTreeMap<usize, BBox>;

pub fn load_ground_truth(path: &Path) -> Result<GroundTruth> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ground_truth(&text, path)
}

/// Parses ground-truth text; `origin` only labels errors.
pub fn parse_ground_truth(text: &str, origin: &Path) -> Result<GroundTruth> {
    let mut gt = GroundTruth::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                origin,
                line_no,
                format!("expected 5 comma-separated fields, got {}", fields.len()),
            ));
        }
        let frame: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(origin, line_no, format!("bad frame index `{}`", fields[0])))?;
        let mut v = [0i64; 4];
        for (slot, f) in v.iter_mut().zip(&fields[1..]) {
            *slot = f
                .parse()
                .map_err(|_| Error::parse(origin, line_no, format!("bad integer `{f}`")))?;
        }
        if v[2] <= 0 || v[3] <= 0 {
            return Err(Error::parse(origin, line_no, "width and height must be positive"));
        }
        let bbox = BBox::new(v[0] as f64, v[1] as f64, v[2] as f64, v[3] as f64);
        if gt.insert(frame, bbox).is_some() {
            return Err(Error::parse(origin, line_no, format!("duplicate frame index {frame}")));
        }
    }
    Ok(gt)
}

/// Serialises with a header line. Coordinates are rounded to integers.
pub fn format_ground_truth(gt: &GroundTruth) -> String {
    let mut out = String::from("# frame,x,y,w,h\n");
    for (frame, b) in gt {
        let _ = writeln!(
            out,
            "{frame},{},{},{},{}",
            b.x.round() as i64,
            b.y.round() as i64,
            b.w.round() as i64,
            b.h.round() as i64
        );
    }
    out
}

pub fn write_ground_truth(path: &Path, gt: &GroundTruth) -> Result<()> {
    std::fs::write(path, format_ground_truth(gt)).map_err(|e| Error::io(path, e))
}

/// Scales every box by `(sx, sy)`, used when frames are resized on load.
pub fn scale_ground_truth(gt: &GroundTruth, sx: f64, sy: f64) -> GroundTruth {
    gt.iter()
        .map(|(&k, b)| (k, BBox::new(b.x * sx, b.y * sy, b.w * sx, b.h * sy)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<GroundTruth> {
        parse_ground_truth(s, Path::new("gt.csv"))
    }

    #[test]
    fn single_record() {
        let gt = parse("0,100,50,40,60").unwrap();
        assert_eq!(gt[&0], BBox::new(100.0, 50.0, 40.0, 60.0));
    }

    #[test]
    fn header_skipped_and_sparse() {
        let gt = parse("# frame,x,y,w,h\n0,1,2,3,4\n\n7, 5, 6, 7, 8\n").unwrap();
        assert_eq!(gt.len(), 2);
        assert_eq!(gt[&7], BBox::new(5.0, 6.0, 7.0, 8.0));
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse("0,1,2,3,4\n0,1,2,3,4\n") {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(line, 2);
                assert!(message.contains("duplicate"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("# h\n1,2,3\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("1,2,3,x,5"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse("1,2,3,0,5"), Err(Error::Parse { .. })));
    }

    #[test]
    fn format_round_trips() {
        let gt = parse("3,1,2,3,4\n0,10,20,30,40").unwrap();
        assert_eq!(parse(&format_ground_truth(&gt)).unwrap(), gt);
    }
}

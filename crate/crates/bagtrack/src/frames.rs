//! Frame sequences on disk.

use std::path::{Path, PathBuf};

use bagtrack_core::Frame;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pgm::read_frame;

/// Files in `dir` whose names match `pattern` (`*` and `?` wildcards),
/// sorted lexicographically by file name.
pub fn list_frames(dir: &Path, pattern: &str) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if wildcard_match(pattern, name) && entry.path().is_file() {
            paths.push(entry.path());
        }
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(paths)
}

/// Loads every matching frame in filename order, optionally resized with
/// bilinear interpolation to `resize_to = (width, height)`.
pub fn load_frames(dir: &Path, pattern: &str, resize_to: Option<(usize, usize)>) -> Result<Vec<Frame>> {
    let paths = list_frames(dir, pattern)?;
    if paths.is_empty() {
        return Err(Error::format(dir, format!("no frames match `{pattern}`")));
    }
    load_frame_files(&paths, resize_to)
}

pub fn load_frame_files(paths: &[PathBuf], resize_to: Option<(usize, usize)>) -> Result<Vec<Frame>> {
    let frames: Vec<Frame> = paths
        .par_iter()
        .map(|p| {
            let f = read_frame(p)?;
            match resize_to {
                Some((w, h)) => Ok(f.resized(w, h)?),
                None => Ok(f),
            }
        })
        .collect::<Result<_>>()?;
    if let Some(first) = frames.first() {
        for (f, p) in frames.iter().zip(paths) {
            if (f.width(), f.height()) != (first.width(), first.height()) {
                return Err(Error::format(
                    p,
                    format!(
                        "frame is {}x{} but the sequence starts at {}x{}",
                        f.width(),
                        f.height(),
                        first.width(),
                        first.height()
                    ),
                ));
            }
        }
    }
    Ok(frames)
}

pub(crate) fn wildcard_match(pattern: &str, name: &str) -> bool {
    let p: Vec<char> = pattern.chars().collect();
    let s: Vec<char> = name.chars().collect();
    let (mut pi, mut si) = (0, 0);
    let mut backtrack: Option<(usize, usize)> = None;
    while si < s.len() {
        if pi < p.len() && (p[pi] == '?' || p[pi] == s[si]) {
            pi += 1;
            si += 1;
        } else if pi < p.len() && p[pi] == '*' {
            backtrack = Some((pi, si));
            pi += 1;
        } else if let Some((bp, bs)) = backtrack {
            pi = bp + 1;
            si = bs + 1;
            backtrack = Some((bp, bs + 1));
        } else {
            return false;
        }
    }
    p[pi..].iter().all(|&c| c == '*')
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pgm::{frame_from_u8, write_pgm};

    #[test]
    fn wildcards() {
        assert!(wildcard_match("*.pgm", "f001.pgm"));
        assert!(!wildcard_match("*.pgm", "f001.png"));
        assert!(wildcard_match("f??.pgm", "f01.pgm"));
        assert!(wildcard_match("*", ""));
        assert!(wildcard_match("a*b*c", "aXXbYc"));
        assert!(!wildcard_match("a*b*c", "aXXbY"));
    }

    #[test]
    fn lexicographic_order_and_sizes() {
        let dir = tempfile::tempdir().unwrap();
        for (name, v) in [("f003.pgm", 3u8), ("f001.pgm", 1), ("f002.pgm", 2)] {
            write_pgm(&dir.path().join(name), &frame_from_u8(2, 2, &[v; 4]).unwrap()).unwrap();
        }
        std::fs::write(dir.path().join("notes.txt"), "x").unwrap();
        let names: Vec<_> = list_frames(dir.path(), "*.pgm")
            .unwrap()
            .iter()
            .map(|p| p.file_name().unwrap().to_str().unwrap().to_owned())
            .collect();
        assert_eq!(names, ["f001.pgm", "f002.pgm", "f003.pgm"]);
        let frames = load_frames(dir.path(), "*.pgm", None).unwrap();
        assert_eq!(frames[0].pixels()[0], 1.0 / 255.0);
        assert_eq!(frames[2].pixels()[0], 3.0 / 255.0);

        let resized = load_frames(dir.path(), "*.pgm", Some((4, 3))).unwrap();
        assert_eq!((resized[1].width(), resized[1].height()), (4, 3));

        write_pgm(&dir.path().join("f004.pgm"), &frame_from_u8(3, 2, &[0; 6]).unwrap()).unwrap();
        assert!(matches!(load_frames(dir.path(), "*.pgm", None), Err(Error::Format { .. })));
        assert!(load_frames(dir.path(), "*.pgm", Some((4, 3))).is_ok());
    }
}

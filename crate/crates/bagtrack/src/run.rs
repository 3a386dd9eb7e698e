//! End-to-end runs over frame sequences.

use std::path::Path;

use bagtrack_core::{BBox, Frame, FrameResult, Tracker, TrackerConfig};

use crate::error::{Error, Result};
use crate::pgm::write_pgm;
use crate::ground_truth::GroundTruth;
use crate::report::RunReport;

/// Environment variable capping the worker count (`0` or unset: rayon default).
pub const THREADS_ENV: &str = "TRACKER_THREADS";

/// Initialises on `frames[0]` at `init` and tracks every later frame.
pub fn track_sequence(frames: &[Frame], init: BBox, cfg: &TrackerConfig) -> Result<Vec<FrameResult>> {
    let Some((first, rest)) = frames.split_first() else {
        return Ok(Vec::new());
    };
    let mut tracker = Tracker::initialize(first, init, cfg.clone())?;
    let results = rest
        .iter()
        .map(|f| tracker.track_frame(f))
        .collect::<bagtrack_core::Result<Vec<_>>>()?;
    let degenerate = results.iter().filter(|r| r.degenerate).count();
    if degenerate > 0 {
        log::warn!("{degenerate} frames fell back to uniform weights");
    }
    Ok(results)
}

/// Tracks and scores against `gt` when given.
pub fn run_tracking(
    frames: &[Frame],
    init: BBox,
    gt: Option<&GroundTruth>,
    cfg: &TrackerConfig,
) -> Result<RunReport> {
    let results = track_sequence(frames, init, cfg)?;
    Ok(RunReport::new(&results, gt, cfg))
}

/// Worker cap from `TRACKER_THREADS`.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs `f` on a pool of `threads` workers, or on the global pool for `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(e) => {
                log::warn!("could not build a {n}-thread pool ({e}); using the default");
                f()
            }
        },
        None => f(),
    }
}

/// Copy of `frame` with the outline of `bbox` drawn at value 1.0.
pub fn draw_box(frame: &Frame, bbox: &BBox) -> Frame {
    let (w, h) = (frame.width(), frame.height());
    let mut px = frame.pixels().to_vec();
    let clampx = |v: f64| (v.round().max(0.0) as usize).min(w - 1);
    let clampy = |v: f64| (v.round().max(0.0) as usize).min(h - 1);
    let (x0, x1) = (clampx(bbox.x), clampx(bbox.x + bbox.w - 1.0));
    let (y0, y1) = (clampy(bbox.y), clampy(bbox.y + bbox.h - 1.0));
    for x in x0..=x1 {
        px[y0 * w + x] = 1.0;
        px[y1 * w + x] = 1.0;
    }
    for y in y0..=y1 {
        px[y * w + x0] = 1.0;
        px[y * w + x1] = 1.0;
    }
    Frame::new(w, h, px).expect("same size, values in range")
}

/// Writes `overlay_{t:04}.pgm` for every tracked frame.
pub fn dump_overlays(frames: &[Frame], results: &[FrameResult], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for r in results {
        let frame = &frames[r.frame_index];
        let path = dir.join(format!("overlay_{:04}.pgm", r.frame_index));
        write_pgm(&path, &draw_box(frame, &r.bbox))?;
    }
    Ok(())
}

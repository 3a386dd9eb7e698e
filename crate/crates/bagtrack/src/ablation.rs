//! Cross-product runs over scenarios, `α`, bag sizes and seeds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bagtrack_core::{BBox, Frame, TrackerConfig};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::frames::load_frame_files;
use crate::ground_truth::GroundTruth;
use crate::manifest::{SequenceManifest, MANIFEST_FILE};
use crate::run::run_tracking;

pub const HEADER: &str = "scenario,alpha,K,seed,mean_error";

/// A loaded sequence with ground truth.
#[derive(Debug, Clone)]
pub struct Sequence {
    pub name: String,
    pub frames: Vec<Frame>,
    pub init: BBox,
    pub gt: GroundTruth,
}

impl Sequence {
    pub fn load(dir: &Path) -> Result<Self> {
        let manifest = SequenceManifest::load(dir)?;
        let gt = manifest
            .gt
            .ok_or_else(|| Error::format(dir.join(MANIFEST_FILE), "ablation needs ground truth"))?;
        let name = dir
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or("sequence")
            .to_owned();
        Ok(Self {
            name,
            frames: load_frame_files(&manifest.frame_paths, None)?,
            init: manifest.init_bbox,
            gt,
        })
    }
}

/// Sequence directories under `root`: `root` itself if it holds a manifest,
/// otherwise every immediate subdirectory that does, sorted by name.
pub fn find_sequences(root: &Path) -> Result<Vec<PathBuf>> {
    if root.join(MANIFEST_FILE).is_file() {
        return Ok(vec![root.to_path_buf()]);
    }
    let mut dirs = Vec::new();
    for entry in std::fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        if path.join(MANIFEST_FILE).is_file() {
            dirs.push(path);
        }
    }
    if dirs.is_empty() {
        return Err(Error::format(root, format!("no `{MANIFEST_FILE}` found")));
    }
    dirs.sort();
    Ok(dirs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub scenario: String,
    pub alpha: f64,
    pub bag_size: usize,
    pub seed: u64,
    pub mean_error: f64,
}

/// RNG seed of one run: `seed ⊕ h(scenario, α, K)`, with `h` the first
/// eight bytes of a SHA-256.
pub fn run_seed(seed: u64, scenario: &str, alpha: f64, bag_size: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(scenario.as_bytes());
    h.update([0]);
    h.update(alpha.to_bits().to_le_bytes());
    h.update((bag_size as u64).to_le_bytes());
    let digest = h.finalize();
    let mut first = [0u8; 8];
    first.copy_from_slice(&digest[..8]);
    seed ^ u64::from_le_bytes(first)
}

/// Runs every combination. Rows come back ordered by scenario, `α`, `K`,
/// then seed, whatever the degree of parallelism.
pub fn run_ablation(
    sequences: &[Sequence],
    base: &TrackerConfig,
    alphas: &[f64],
    bag_sizes: &[usize],
    seeds: &[u64],
) -> Result<Vec<AblationRow>> {
    let mut jobs = Vec::new();
    for seq in sequences {
        for &alpha in alphas {
            for &k in bag_sizes {
                for &seed in seeds {
                    jobs.push((seq, alpha, k, seed));
                }
            }
        }
    }
    jobs.par_iter()
        .map(|&(seq, alpha, k, seed)| {
            let cfg = TrackerConfig {
                alpha,
                bag_size: k,
                seed: run_seed(seed, &seq.name, alpha, k),
                ..base.clone()
            };
            crate::config::validate(&cfg)?;
            let report = run_tracking(&seq.frames, seq.init, Some(&seq.gt), &cfg)?;
            let mean_error = report
                .mean_error
                .ok_or_else(|| Error::Config {
                    key: "gt".into(),
                    message: format!("scenario {} has no annotated tracked frames", seq.name),
                })?;
            Ok(AblationRow {
                scenario: seq.name.clone(),
                alpha,
                bag_size: k,
                seed,
                mean_error,
            })
        })
        .collect()
}

/// Mean error per `(scenario, α, K)` cell over seeds, in row order.
pub fn cell_means(rows: &[AblationRow]) -> Vec<(String, f64, usize, f64)> {
    let mut cells: Vec<(String, f64, usize, Vec<f64>)> = Vec::new();
    for r in rows {
        match cells
            .iter_mut()
            .find(|c| c.0 == r.scenario && c.1 == r.alpha && c.2 == r.bag_size)
        {
            Some(c) => c.3.push(r.mean_error),
            None => cells.push((r.scenario.clone(), r.alpha, r.bag_size, vec![r.mean_error])),
        }
    }
    cells
        .into_iter()
        .map(|(s, a, k, e)| (s, a, k, e.iter().sum::<f64>() / e.len() as f64))
        .collect()
}

/// Mean error per `(α, K)` over every scenario and seed.
pub fn setting_means(rows: &[AblationRow]) -> BTreeMap<(u64, usize), f64> {
    let mut acc: BTreeMap<(u64, usize), (f64, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry((r.alpha.to_bits(), r.bag_size)).or_default();
        e.0 += r.mean_error;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

/// Long-format CSV with per-cell means as `# mean,...` footer lines.
pub fn format_ablation(rows: &[AblationRow]) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6}",
            r.scenario, r.alpha, r.bag_size, r.seed, r.mean_error
        );
    }
    for (s, a, k, m) in cell_means(rows) {
        let _ = writeln!(out, "# mean,{s},{a},{k},{m:.6}");
    }
    out
}

pub fn write_ablation(rows: &[AblationRow], path: &Path) -> Result<()> {
    std::fs::write(path, format_ablation(rows)).map_err(|e| Error::io(path, e))
}

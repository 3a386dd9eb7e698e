//! Synthetic test sequences with exact ground truth.
//!
//! A textured rectangle moves along a straight line over a constant
//! background. Optional effects: an occluder painted over part of the
//! target for a span of frames, a multiplicative illumination ramp, and
//! additive Gaussian pixel noise. The renderer places the target at integer
//! positions so the written ground truth is exact.

use std::path::Path;

use bagtrack_core::{BBox, Frame};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::ground_truth::{write_ground_truth, GroundTruth};
use crate::manifest::SequenceManifest;
use crate::pgm::write_pgm;

/// Gray level of the occluding block.
pub const OCCLUDER_VALUE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Texture {
    /// Square cells alternating between `lo` and `hi`.
    Checkerboard { cell: usize, lo: f64, hi: f64 },
    /// Horizontal ramp from `lo` at the left edge to `hi` at the right.
    Gradient { lo: f64, hi: f64 },
}

impl Texture {
    fn value(&self, u: usize, v: usize, width: usize) -> f64 {
        match *self {
            Texture::Checkerboard { cell, lo, hi } => {
                if (u / cell + v / cell) % 2 == 0 {
                    hi
                } else {
                    lo
                }
            }
            Texture::Gradient { lo, hi } => {
                let t = if width > 1 {
                    u as f64 / (width - 1) as f64
                } else {
                    0.0
                };
                lo + (hi - lo) * t
            }
        }
    }
}

/// `coverage` of the target's width (from its left edge) is painted with
/// [`OCCLUDER_VALUE`] in frames `start .. start + length`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occlusion {
    pub start: usize,
    pub length: usize,
    pub coverage: f64,
}

impl Occlusion {
    pub fn active(&self, frame: usize) -> bool {
        (self.start..self.start + self.length).contains(&frame)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScenario {
    pub name: String,
    pub frame_count: usize,
    pub width: usize,
    pub height: usize,
    pub target_w: usize,
    pub target_h: usize,
    /// Top-left corner in frame 0.
    pub start: (f64, f64),
    /// Pixels per frame.
    pub velocity: (f64, f64),
    pub texture: Texture,
    pub background: f64,
    pub occlusion: Option<Occlusion>,
    /// Gain reached in the last frame; ramps linearly from 1.
    pub illumination_gain: Option<f64>,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticScenario {
    /// Linear-motion checkerboard target on a black 320x240 frame.
    pub fn linear(name: &str, frame_count: usize, velocity: (f64, f64)) -> Self {
        Self {
            name: name.to_owned(),
            frame_count,
            width: 320,
            height: 240,
            target_w: 40,
            target_h: 40,
            start: (40.0, 100.0),
            velocity,
            texture: Texture::Checkerboard {
                cell: 8,
                lo: 0.5,
                hi: 1.0,
            },
            background: 0.0,
            occlusion: None,
            illumination_gain: None,
            noise_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Error::Config {
            key: format!("scenario {}", self.name),
            message: m,
        };
        if self.frame_count < 2 {
            return Err(bad("needs at least 2 frames".into()));
        }
        if self.target_w < 2 || self.target_h < 2 {
            return Err(bad("target must be at least 2x2".into()));
        }
        if let Texture::Checkerboard { cell: 0, .. } = self.texture {
            return Err(bad("checkerboard cell must be positive".into()));
        }
        for t in [0, self.frame_count - 1] {
            let b = self.target_box(t);
            let inside = b.x >= 1.0
                && b.y >= 1.0
                && b.x + b.w <= self.width as f64 - 1.0
                && b.y + b.h <= self.height as f64 - 1.0;
            if !inside {
                return Err(bad(format!("target leaves the frame at frame {t}")));
            }
        }
        if let Some(o) = self.occlusion {
            if !(0.0..=1.0).contains(&o.coverage) {
                return Err(bad("occlusion coverage must lie in [0, 1]".into()));
            }
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(bad("noise sigma must be non-negative".into()));
        }
        Ok(())
    }

    /// Exact target box in frame `t`.
    pub fn target_box(&self, t: usize) -> BBox {
        BBox::new(
            (self.start.0 + self.velocity.0 * t as f64).round(),
            (self.start.1 + self.velocity.1 * t as f64).round(),
            self.target_w as f64,
            self.target_h as f64,
        )
    }

    pub fn ground_truth(&self) -> GroundTruth {
        (0..self.frame_count).map(|t| (t, self.target_box(t))).collect()
    }

    fn gain(&self, t: usize) -> f64 {
        match self.illumination_gain {
            Some(g) if self.frame_count > 1 => 1.0 + (g - 1.0) * t as f64 / (self.frame_count - 1) as f64,
            _ => 1.0,
        }
    }

    /// Noise-free rendering of frame `t`, before clamping.
    fn render_clean(&self, t: usize) -> Vec<f64> {
        let b = self.target_box(t);
        let (x0, y0) = (b.x as usize, b.y as usize);
        let covered = match self.occlusion {
            Some(o) if o.active(t) => (o.coverage * self.target_w as f64).round() as usize,
            _ => 0,
        };
        let mut px = vec![self.background; self.width * self.height];
        for v in 0..self.target_h {
            for u in 0..self.target_w {
                let value = if u < covered {
                    OCCLUDER_VALUE
                } else {
                    self.texture.value(u, v, self.target_w)
                };
                px[(y0 + v) * self.width + x0 + u] = value;
            }
        }
        px
    }

    /// All frames, rendered deterministically from the scenario seed.
    pub fn render(&self) -> Result<Vec<Frame>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let noise = if self.noise_sigma > 0.0 {
            Some(Normal::new(0.0, self.noise_sigma).expect("sigma checked"))
        } else {
            None
        };
        (0..self.frame_count)
            .map(|t| {
                let g = self.gain(t);
                let px = self
                    .render_clean(t)
                    .into_iter()
                    .map(|v| {
                        let n = noise.map_or(0.0, |d| d.sample(&mut rng));
                        (v * g + n).clamp(0.0, 1.0)
                    })
                    .collect();
                Ok(Frame::new(self.width, self.height, px)?)
            })
            .collect()
    }
}

/// Writes `frame_0000.pgm ...`, `gt.csv` and `sequence.txt` into `out_dir`.
pub fn generate_sequence(scenario: &SyntheticScenario, out_dir: &Path) -> Result<SequenceManifest> {
    let frames = scenario.render()?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut paths = Vec::with_capacity(frames.len());
    for (t, f) in frames.iter().enumerate() {
        let path = out_dir.join(format!("frame_{t:04}.pgm"));
        write_pgm(&path, f)?;
        paths.push(path);
    }
    let gt = scenario.ground_truth();
    write_ground_truth(&out_dir.join("gt.csv"), &gt)?;
    let manifest = SequenceManifest {
        frame_paths: paths,
        width: scenario.width,
        height: scenario.height,
        init_bbox: scenario.target_box(0),
        gt: Some(gt),
    };
    manifest.save(out_dir)?;
    Ok(manifest)
}

/// The six canonical scenarios: static, slow linear, fast linear, 50%
/// partial occlusion, 10-frame full occlusion and a x1.5 illumination ramp.
pub fn standard_suite() -> Vec<SyntheticScenario> {
    let still = SyntheticScenario::linear("static", 60, (0.0, 0.0));
    let slow = SyntheticScenario::linear("slow_linear", 100, (2.0, 0.0));
    let mut fast = SyntheticScenario::linear("fast_linear", 60, (3.0, 1.0));
    fast.start = (20.0, 60.0);
    let mut partial = SyntheticScenario::linear("partial_occlusion", 100, (2.0, 0.0));
    partial.occlusion = Some(Occlusion {
        start: 30,
        length: 30,
        coverage: 0.5,
    });
    let mut light = SyntheticScenario::linear("illumination", 100, (2.0, 0.0));
    light.illumination_gain = Some(1.5);
    vec![still, slow, fast, partial, full_occlusion_scenario(), light]
}

/// Target fully covered for frames 40-49 while moving 2 px/frame.
pub fn full_occlusion_scenario() -> SyntheticScenario {
    let mut s = SyntheticScenario::linear("full_occlusion", 100, (2.0, 0.0));
    s.occlusion = Some(Occlusion {
        start: 40,
        length: 10,
        coverage: 1.0,
    });
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_velocity_without_noise_is_constant() {
        let s = SyntheticScenario::linear("still", 5, (0.0, 0.0));
        let frames = s.render().unwrap();
        assert!(frames.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn linear_ground_truth_steps() {
        let s = SyntheticScenario::linear("slow", 50, (2.0, 0.0));
        let gt = s.ground_truth();
        let xs: Vec<f64> = gt.values().map(|b| b.x).collect();
        assert_eq!(xs.len(), 50);
        assert!(xs.windows(2).all(|w| w[1] - w[0] == 2.0));
        assert!(gt.values().all(|b| b.y == 100.0));
    }

    #[test]
    fn occluder_applies_to_exact_frames() {
        let mut s = SyntheticScenario::linear("occ", 35, (2.0, 0.0));
        s.occlusion = Some(Occlusion {
            start: 20,
            length: 10,
            coverage: 1.0,
        });
        let frames = s.render().unwrap();
        for (t, f) in frames.iter().enumerate() {
            let b = s.target_box(t);
            let all_gray = (0..s.target_h).all(|v| {
                (0..s.target_w)
                    .all(|u| f.get(b.x as usize + u, b.y as usize + v) == OCCLUDER_VALUE)
            });
            assert_eq!(all_gray, (20..30).contains(&t), "frame {t}");
        }
    }

    #[test]
    fn noise_is_seeded_and_clamped() {
        let mut s = SyntheticScenario::linear("noisy", 3, (1.0, 1.0));
        s.noise_sigma = 0.3;
        s.seed = 11;
        let a = s.render().unwrap();
        assert_eq!(a, s.render().unwrap());
        assert!(a.iter().all(|f| f.pixels().iter().all(|v| (0.0..=1.0).contains(v))));
        s.seed = 12;
        assert_ne!(a, s.render().unwrap());
    }

    #[test]
    fn out_of_frame_path_rejected() {
        let s = SyntheticScenario::linear("runaway", 200, (2.0, 0.0));
        assert!(s.validate().is_err());
        for s in standard_suite() {
            s.validate().unwrap();
        }
    }

    #[test]
    fn illumination_ramp_clamps() {
        let mut s = SyntheticScenario::linear("light", 11, (0.0, 0.0));
        s.illumination_gain = Some(1.5);
        let frames = s.render().unwrap();
        // The light cells start saturated; the dark ones brighten to 0.75.
        let b = s.target_box(10);
        let (x, y) = (b.x as usize, b.y as usize);
        assert_eq!(frames[10].get(x, y), 1.0);
        assert_eq!(frames[0].get(x + 8, y), 0.5);
        assert!((frames[10].get(x + 8, y) - 0.75).abs() < 1e-12);
    }
}

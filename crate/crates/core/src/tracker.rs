//! One tracking run: resample, propagate, score every candidate against
//! the bag, pick the winner and update the history and the bag.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::SeedableRng;

use crate::appearance::{
    build_candidate_subspace, crop_rect, extract_patch, BBox, Bag, Frame, HistoryBuffer,
    ParticleState, PatchGeometry,
};
use crate::error::{invalid_arg, Error, Result};
use crate::filter::{
    normalize_weights, perturb, resample_with, MotionModel, MotionNoise, ParticleSet, Resampling,
    StateBounds, TrackerRng,
};
use crate::geometry::{affine_dist, AffineSubspace};
use crate::likelihood::{log_likelihood, normalize_log_columns, overall_likelihood, select_winner};
use crate::matrix::Matrix;

/// Every tunable of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    /// Particle count `N`.
    pub particles: usize,
    /// Subspace dimension `n`.
    pub subspace_dim: usize,
    /// History length `P`.
    pub history_len: usize,
    /// Bag capacity `K`.
    pub bag_size: usize,
    /// Bag update period `W`, in frames.
    pub update_period: usize,
    /// Weight of the origin term in the affine distance.
    pub alpha: f64,
    /// Likelihood temperature `σ`.
    pub sigma: f64,
    /// Patch rows `H₁`.
    pub patch_h: usize,
    /// Patch columns `H₂`.
    pub patch_w: usize,
    pub motion: MotionModel,
    pub s_min: f64,
    pub s_max: f64,
    pub seed: u64,
    /// Subtract the window mean before the SVD.
    pub center_before_svd: bool,
    pub resampling: Resampling,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            particles: 100,
            subspace_dim: 3,
            history_len: 5,
            bag_size: 10,
            update_period: 5,
            alpha: 0.5,
            sigma: 0.01,
            patch_h: 32,
            patch_w: 32,
            motion: MotionModel::default(),
            s_min: 0.5,
            s_max: 2.0,
            seed: 0,
            center_before_svd: false,
            resampling: Resampling::Multinomial,
        }
    }
}

fn config_err(key: &'static str, reason: String) -> Error {
    Error::InvalidConfig { key, reason }
}

impl TrackerConfig {
    /// Checks every range constraint. Errors name the offending key using
    /// the config-file spelling (`N`, `n`, `P`, `K`, `W`, ...).
    pub fn validate(&self) -> Result<()> {
        if self.particles < 1 {
            return Err(config_err("N", "must be at least 1".into()));
        }
        if self.history_len < 1 {
            return Err(config_err("P", "must be at least 1".into()));
        }
        if self.subspace_dim < 1 || self.subspace_dim > self.history_len + 1 {
            return Err(config_err(
                "n",
                format!("must lie in [1, P+1 = {}], got {}", self.history_len + 1, self.subspace_dim),
            ));
        }
        if self.bag_size < 1 {
            return Err(config_err("K", "must be at least 1".into()));
        }
        if self.update_period < 1 {
            return Err(config_err("W", "must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(config_err("alpha", format!("must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(config_err("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if self.patch_h < 1 {
            return Err(config_err("H1", "must be at least 1".into()));
        }
        if self.patch_w < 1 {
            return Err(config_err("H2", "must be at least 1".into()));
        }
        if self.patch_h * self.patch_w < self.history_len + 1 {
            return Err(config_err(
                "P",
                format!("window of {} patches exceeds patch dimension", self.history_len + 1),
            ));
        }
        for (key, v) in [
            ("var_x", self.motion.var_x),
            ("var_y", self.motion.var_y),
            ("var_s", self.motion.var_s),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(config_err(key, format!("must be positive, got {v}")));
            }
        }
        if !(self.s_min > 0.0) || self.s_min > 1.0 {
            return Err(config_err("s_min", format!("must lie in (0, 1], got {}", self.s_min)));
        }
        if !(self.s_max >= 1.0) || !self.s_max.is_finite() {
            return Err(config_err("s_max", format!("must be finite and >= 1, got {}", self.s_max)));
        }
        Ok(())
    }

    /// Patch dimension `D = H₁·H₂`.
    pub fn patch_dim(&self) -> usize {
        self.patch_h * self.patch_w
    }
}

/// Outcome of one tracked frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    /// Frames since initialisation; the first tracked frame is 1.
    pub frame_index: usize,
    pub winner: ParticleState,
    /// Crop rectangle of the winner.
    pub bbox: BBox,
    /// Sum-rule likelihood of the winner, in `(0, K]`.
    pub winner_likelihood: f64,
    /// Bag length after this frame's update.
    pub bag_size: usize,
    /// Set when the likelihoods were unusable and weights fell back to uniform.
    pub degenerate: bool,
}

/// Scores of one candidate against the bag.
struct Candidate {
    patch: Vec<f64>,
    subspace: AffineSubspace,
    log_lik: Vec<f64>,
}

/// State of a single-target tracking run.
#[derive(Debug, Clone)]
pub struct Tracker {
    cfg: TrackerConfig,
    geom: PatchGeometry,
    bounds: StateBounds,
    frame_w: usize,
    frame_h: usize,
    particles: ParticleSet,
    history: HistoryBuffer,
    bag: Bag,
    rng: TrackerRng,
    frame_index: usize,
}

impl Tracker {
    /// Starts a run from the target box `init` in `frame0`.
    ///
    /// All particles start at `(x, y, 1)`, the history holds `P` copies of
    /// the initial patch and the bag holds the subspace of that window.
    pub fn initialize(frame0: &Frame, init: BBox, cfg: TrackerConfig) -> Result<Self> {
        cfg.validate()?;
        let (fw, fh) = (frame0.width(), frame0.height());
        let inside = init.x >= 0.0
            && init.y >= 0.0
            && init.w > 0.0
            && init.h > 0.0
            && init.x + init.w <= fw as f64
            && init.y + init.h <= fh as f64;
        if !inside {
            return Err(invalid_arg!(
                "initial box ({}, {}, {}, {}) is not inside the {fw}x{fh} frame",
                init.x,
                init.y,
                init.w,
                init.h
            ));
        }
        if libm::round(cfg.s_min * init.w) < 2.0 || libm::round(cfg.s_min * init.h) < 2.0 {
            return Err(invalid_arg!(
                "initial box {}x{} shrinks below 2x2 pixels at s_min = {}",
                init.w,
                init.h,
                cfg.s_min
            ));
        }

        let geom = PatchGeometry {
            base_w: init.w,
            base_h: init.h,
            h1: cfg.patch_h,
            h2: cfg.patch_w,
        };
        let bounds = StateBounds {
            frame_w: fw as f64,
            frame_h: fh as f64,
            base_w: init.w,
            base_h: init.h,
            s_min: cfg.s_min,
            s_max: cfg.s_max,
        };
        let start = ParticleState::new(init.x, init.y, 1.0);
        let patch = extract_patch(frame0, &start, &geom)?;
        let history = HistoryBuffer::padded(cfg.history_len, &patch);
        let seed_subspace =
            build_candidate_subspace(&patch, &history, cfg.subspace_dim, cfg.center_before_svd)?;
        let mut bag = Bag::new(cfg.bag_size);
        bag.insert(seed_subspace);

        Ok(Self {
            particles: ParticleSet::uniform(start, cfg.particles)?,
            rng: TrackerRng::seed_from_u64(cfg.seed),
            cfg,
            geom,
            bounds,
            frame_w: fw,
            frame_h: fh,
            history,
            bag,
            frame_index: 0,
        })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.cfg
    }

    pub fn particles(&self) -> &ParticleSet {
        &self.particles
    }

    pub fn history(&self) -> &HistoryBuffer {
        &self.history
    }

    pub fn bag(&self) -> &Bag {
        &self.bag
    }

    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    pub fn geometry(&self) -> &PatchGeometry {
        &self.geom
    }

    /// Processes the next frame.
    pub fn track_frame(&mut self, frame: &Frame) -> Result<FrameResult> {
        if frame.width() != self.frame_w || frame.height() != self.frame_h {
            return Err(invalid_arg!(
                "frame is {}x{}, run started at {}x{}",
                frame.width(),
                frame.height(),
                self.frame_w,
                self.frame_h
            ));
        }
        let t = self.frame_index + 1;

        let resampled = resample_with(&self.particles, self.cfg.resampling, &mut self.rng)?;
        let states: Vec<ParticleState> = resampled
            .into_iter()
            .map(|s| {
                let noise = MotionNoise::draw(&mut self.rng);
                self.bounds.clamp(perturb(s, &self.cfg.motion, noise))
            })
            .collect();

        let candidates = self.evaluate(frame, &states)?;
        let n = states.len();
        let k = self.bag.len();
        let mut logs = Matrix::zeros(n, k);
        for (i, c) in candidates.iter().enumerate() {
            for (j, &l) in c.log_lik.iter().enumerate() {
                logs[(i, j)] = l;
            }
        }

        let (overall, degenerate) = match normalize_log_columns(&logs) {
            Ok(normalized) => (overall_likelihood(&normalized), false),
            Err(Error::DegenerateLikelihood { .. }) | Err(Error::InvalidInput(_)) => {
                log::warn!("frame {t}: degenerate likelihoods, falling back to uniform weights");
                (alloc::vec![k as f64 / n as f64; n], true)
            }
            Err(e) => return Err(e),
        };
        let winner = select_winner(&overall)?;
        let weights = normalize_weights(&overall).unwrap_or_else(|_| alloc::vec![1.0 / n as f64; n]);
        self.particles = ParticleSet::new(states.clone(), weights)?;

        let Candidate {
            patch, subspace, ..
        } = candidates.into_iter().nth(winner).expect("winner index in range");
        self.history.push(patch)?;
        if t % self.cfg.update_period == 0 {
            self.bag.insert(subspace);
        }
        self.frame_index = t;

        let state = states[winner];
        let rect = crop_rect(
            self.frame_w,
            self.frame_h,
            &state,
            self.geom.base_w,
            self.geom.base_h,
        )?;
        Ok(FrameResult {
            frame_index: t,
            winner: state,
            bbox: rect.into(),
            winner_likelihood: overall[winner],
            bag_size: self.bag.len(),
            degenerate,
        })
    }

    fn evaluate(&self, frame: &Frame, states: &[ParticleState]) -> Result<Vec<Candidate>> {
        let score = |state: &ParticleState| -> Result<Candidate> {
            let patch = extract_patch(frame, state, &self.geom)?;
            let subspace = build_candidate_subspace(
                &patch,
                &self.history,
                self.cfg.subspace_dim,
                self.cfg.center_before_svd,
            )?;
            let log_lik = self
                .bag
                .iter()
                .map(|entry| {
                    affine_dist(&subspace, entry, self.cfg.alpha)
                        .map(|d| log_likelihood(d, self.cfg.sigma))
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(Candidate {
                patch,
                subspace,
                log_lik,
            })
        };
        map_particles(states, score).into_iter().collect()
    }
}

// Order-preserving map: results are identical whatever the worker count.
#[cfg(feature = "parallel")]
fn map_particles<T, F>(states: &[ParticleState], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&ParticleState) -> T + Sync + Send,
{
    use rayon::prelude::*;
    states.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_particles<T, F>(states: &[ParticleState], f: F) -> Vec<T>
where
    F: Fn(&ParticleState) -> T,
{
    states.iter().map(f).collect()
}

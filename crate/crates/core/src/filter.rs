//! Sequential importance resampling over `(x, y, s)`.
//!
//! All randomness flows through one [`TrackerRng`] stream in a fixed order:
//! the resampling draws first, then one Gaussian triple per particle in
//! index order.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::appearance::ParticleState;
use crate::error::{invalid_arg, invalid_input, Error, Result};

/// Deterministic generator behind every stochastic draw: ChaCha with
/// 8 rounds, seeded from a `u64`.
pub type TrackerRng = ChaCha8Rng;

/// Seeds the tracker generator.
pub fn rng_from_seed(seed: u64) -> TrackerRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Tolerance on `Σw = 1`.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// Particles and their normalised weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    particles: Vec<ParticleState>,
    weights: Vec<f64>,
}

impl ParticleSet {
    pub fn new(particles: Vec<ParticleState>, weights: Vec<f64>) -> Result<Self> {
        if particles.is_empty() {
            return Err(invalid_arg!("particle set must be non-empty"));
        }
        if particles.len() != weights.len() {
            return Err(invalid_arg!(
                "{} particles but {} weights",
                particles.len(),
                weights.len()
            ));
        }
        check_simplex(&weights)?;
        Ok(Self { particles, weights })
    }

    /// `n` copies of `state` with weight `1/n` each.
    pub fn uniform(state: ParticleState, n: usize) -> Result<Self> {
        Self::from_particles(alloc::vec![state; n])
    }

    /// Uniform weights over the given particles.
    pub fn from_particles(particles: Vec<ParticleState>) -> Result<Self> {
        let n = particles.len();
        if n == 0 {
            return Err(invalid_arg!("particle set must be non-empty"));
        }
        Ok(Self {
            particles,
            weights: alloc::vec![1.0 / n as f64; n],
        })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[ParticleState] {
        &self.particles
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Replaces the weights with `likelihoods / Σ likelihoods`.
    pub fn set_weights(&mut self, likelihoods: &[f64]) -> Result<()> {
        if likelihoods.len() != self.particles.len() {
            return Err(invalid_arg!(
                "{} likelihoods for {} particles",
                likelihoods.len(),
                self.particles.len()
            ));
        }
        self.weights = normalize_weights(likelihoods)?;
        Ok(())
    }

    pub fn reset_uniform(&mut self) {
        let n = self.particles.len() as f64;
        self.weights.iter_mut().for_each(|w| *w = 1.0 / n);
    }
}

fn check_simplex(weights: &[f64]) -> Result<()> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(invalid_input!("weights must be finite and non-negative"));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(invalid_input!("weights sum to {sum}, expected 1"));
    }
    Ok(())
}

/// `l / Σl`. Fails on negative or non-finite input and on zero total mass.
pub fn normalize_weights(likelihoods: &[f64]) -> Result<Vec<f64>> {
    if likelihoods.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(invalid_input!("likelihoods must be finite and non-negative"));
    }
    let sum: f64 = likelihoods.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::DegenerateWeights);
    }
    Ok(likelihoods.iter().map(|l| l / sum).collect())
}

/// Resampling scheme. Only `Multinomial` follows the tracker as published;
/// `Systematic` is an opt-in lower-variance alternative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resampling {
    #[default]
    Multinomial,
    Systematic,
}

/// Draws `N` particles with replacement, slot `j` picking particle `i`
/// with probability `wᵢ`.
pub fn resample<R: Rng + ?Sized>(set: &ParticleSet, rng: &mut R) -> Result<Vec<ParticleState>> {
    resample_with(set, Resampling::Multinomial, rng)
}

pub fn resample_with<R: Rng + ?Sized>(
    set: &ParticleSet,
    scheme: Resampling,
    rng: &mut R,
) -> Result<Vec<ParticleState>> {
    check_simplex(&set.weights)?;
    let n = set.len();
    let cdf = cumulative(&set.weights);
    let pick = |u: f64| -> ParticleState {
        // First index whose cumulative weight exceeds u; zero-weight particles are never hit.
        let i = cdf.partition_point(|&c| c <= u).min(n - 1);
        set.particles[last_positive(&set.weights, i)]
    };
    let total = cdf[n - 1];
    Ok(match scheme {
        Resampling::Multinomial => (0..n)
            .map(|_| pick(rng.random::<f64>() * total))
            .collect(),
        Resampling::Systematic => {
            let offset: f64 = rng.random();
            (0..n)
                .map(|j| pick((j as f64 + offset) / n as f64 * total))
                .collect()
        }
    })
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// Steps back from `i` to the nearest particle with positive weight. Only
/// matters when rounding pushes `u` past the last positive bin.
fn last_positive(weights: &[f64], i: usize) -> usize {
    (0..=i).rev().find(|&k| weights[k] > 0.0).unwrap_or(i)
}

/// Diagonal Brownian motion covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionModel {
    pub var_x: f64,
    pub var_y: f64,
    pub var_s: f64,
}

impl MotionModel {
    pub fn new(var_x: f64, var_y: f64, var_s: f64) -> Result<Self> {
        let m = Self { var_x, var_y, var_s };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("var_x", self.var_x), ("var_y", self.var_y), ("var_s", self.var_s)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid_arg!("{name} must be positive and finite, got {v}"));
            }
        }
        Ok(())
    }
}

impl Default for MotionModel {
    fn default() -> Self {
        Self {
            var_x: 25.0,
            var_y: 25.0,
            var_s: 1e-4,
        }
    }
}

/// Box constraints applied after each Brownian step. The `x`/`y` ranges
/// are functions of the clamped scale so the patch stays inside the frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateBounds {
    pub frame_w: f64,
    pub frame_h: f64,
    pub base_w: f64,
    pub base_h: f64,
    pub s_min: f64,
    pub s_max: f64,
}

impl StateBounds {
    pub fn clamp(&self, state: ParticleState) -> ParticleState {
        let s = state.s.clamp(self.s_min, self.s_max);
        let x_max = (self.frame_w - s * self.base_w).max(0.0);
        let y_max = (self.frame_h - s * self.base_h).max(0.0);
        ParticleState {
            x: state.x.clamp(0.0, x_max),
            y: state.y.clamp(0.0, y_max),
            s,
        }
    }

    pub fn contains(&self, state: &ParticleState) -> bool {
        self.clamp(*state) == *state
    }
}

/// Standard-normal triple for one particle step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionNoise {
    pub x: f64,
    pub y: f64,
    pub s: f64,
}

impl MotionNoise {
    pub fn draw<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Self {
            x: rng.sample(StandardNormal),
            y: rng.sample(StandardNormal),
            s: rng.sample(StandardNormal),
        }
    }
}

/// Gaussian step without clamping.
pub fn perturb(state: ParticleState, motion: &MotionModel, noise: MotionNoise) -> ParticleState {
    ParticleState {
        x: state.x + libm::sqrt(motion.var_x) * noise.x,
        y: state.y + libm::sqrt(motion.var_y) * noise.y,
        s: state.s + libm::sqrt(motion.var_s) * noise.s,
    }
}

/// One Brownian step followed by clamping into `bounds`.
pub fn propagate<R: Rng + ?Sized>(
    state: ParticleState,
    motion: &MotionModel,
    bounds: &StateBounds,
    rng: &mut R,
) -> ParticleState {
    bounds.clamp(perturb(state, motion, MotionNoise::draw(rng)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(i: usize) -> ParticleState {
        ParticleState::new(i as f64, 0.0, 1.0)
    }

    #[test]
    fn degenerate_distribution_copies_one_particle() {
        let mut weights = vec![0.0; 10];
        weights[0] = 1.0;
        let set = ParticleSet::new((0..10).map(p).collect(), weights).unwrap();
        let mut rng = rng_from_seed(3);
        let out = resample(&set, &mut rng).unwrap();
        assert_eq!(out.len(), 10);
        assert!(out.iter().all(|s| *s == p(0)));
    }

    #[test]
    fn zero_weight_tail_is_never_drawn() {
        let set = ParticleSet::new(vec![p(0), p(1), p(2)], vec![0.5, 0.5, 0.0]).unwrap();
        let mut rng = rng_from_seed(9);
        for _ in 0..2000 {
            for s in resample(&set, &mut rng).unwrap() {
                assert_ne!(s, p(2));
            }
        }
    }

    #[test]
    fn systematic_respects_counts() {
        let set = ParticleSet::new(vec![p(0), p(0), p(1), p(1)], vec![0.375, 0.375, 0.125, 0.125])
            .unwrap();
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            let out = resample_with(&set, Resampling::Systematic, &mut rng).unwrap();
            assert_eq!(out.iter().filter(|s| **s == p(0)).count(), 3);
        }
    }

    #[test]
    fn invalid_weights_rejected() {
        assert!(ParticleSet::new(vec![p(0), p(1)], vec![0.5, 0.6]).is_err());
        assert!(ParticleSet::new(vec![p(0), p(1)], vec![1.5, -0.5]).is_err());
        assert!(ParticleSet::new(vec![p(0)], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn set_weights_examples() {
        let mut set = ParticleSet::uniform(p(0), 2).unwrap();
        set.set_weights(&[0.2, 0.6]).unwrap();
        assert!((set.weights()[0] - 0.25).abs() < 1e-15);
        assert!((set.weights()[1] - 0.75).abs() < 1e-15);
        set.set_weights(&[3.0, 3.0]).unwrap();
        assert_eq!(set.weights(), &[0.5, 0.5]);
        assert_eq!(set.set_weights(&[0.0, 0.0]), Err(Error::DegenerateWeights));
        assert!(set.set_weights(&[1.0]).is_err());
    }

    #[test]
    fn zero_noise_limit_is_identity() {
        let motion = MotionModel {
            var_x: 1e-300,
            var_y: 1e-300,
            var_s: 1e-300,
        };
        let bounds = StateBounds {
            frame_w: 100.0,
            frame_h: 100.0,
            base_w: 10.0,
            base_h: 10.0,
            s_min: 0.5,
            s_max: 2.0,
        };
        let start = ParticleState::new(40.0, 30.0, 1.0);
        let mut rng = rng_from_seed(0);
        for _ in 0..100 {
            assert_eq!(propagate(start, &motion, &bounds, &mut rng), start);
        }
    }

    #[test]
    fn edge_states_stay_in_bounds() {
        let motion = MotionModel::new(400.0, 400.0, 1.0).unwrap();
        let bounds = StateBounds {
            frame_w: 64.0,
            frame_h: 48.0,
            base_w: 20.0,
            base_h: 10.0,
            s_min: 0.5,
            s_max: 2.0,
        };
        let mut rng = rng_from_seed(5);
        let mut state = ParticleState::new(44.0, 0.0, 2.0);
        for _ in 0..10_000 {
            state = propagate(state, &motion, &bounds, &mut rng);
            assert!(bounds.contains(&state));
            assert!(state.x + state.s * 20.0 <= 64.0 + 1e-9);
        }
    }

    #[test]
    fn motion_validation() {
        assert!(MotionModel::new(0.0, 1.0, 1.0).is_err());
        assert!(MotionModel::new(1.0, f64::INFINITY, 1.0).is_err());
        assert!(MotionModel::default().validate().is_ok());
    }
}

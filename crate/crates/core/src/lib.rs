//! Visual object tracking with bags of affine subspaces.
//!
//! The target is modelled as a FIFO bag of affine subspaces `{μ, U}`, each
//! built from the tracked object's recent appearance. Every frame a particle
//! filter proposes candidate boxes; each candidate is turned into its own
//! affine subspace and compared to the bag with a mix of origin distance and
//! normalised Grassmann geodesic distance.
//!
//! The crate is `no_std` with `alloc`. Enable `std` for `std::error::Error`
//! and `parallel` to score particles on a rayon pool.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod appearance;
pub mod error;
pub mod filter;
pub mod geometry;
pub mod likelihood;
pub mod matrix;
pub mod tracker;

pub use appearance::{
    build_candidate_subspace, crop_rect, extract_patch, BBox, Bag, Frame, HistoryBuffer,
    ParticleState, PatchGeometry, PixelRect,
};
pub use error::{Error, Result};
pub use filter::{
    propagate, resample, resample_with, rng_from_seed, MotionModel, ParticleSet, Resampling,
    StateBounds, TrackerRng,
};
pub use geometry::{
    affine_dist, geodesic_dist_sq, normalized_geodesic_dist, normalized_origin_dist,
    principal_angles, thin_svd_basis, AffineSubspace, BasisMatrix, ThinSvdBasis,
};
pub use likelihood::{
    likelihood, log_likelihood, normalize_log_columns, normalize_over_particles,
    overall_likelihood, select_winner,
};
pub use matrix::Matrix;
pub use tracker::{FrameResult, Tracker, TrackerConfig};

//! Subspace geometry on the Grassmann manifold.
//!
//! A point of `G(D, n)` is represented by a `D×n` matrix with orthonormal
//! columns. Two bases that differ by an `n×n` rotation describe the same
//! point, so every comparison here goes through principal angles rather
//! than raw basis entries.

mod svd;

pub use svd::{thin_svd_basis, JacobiSvd, ThinSvdBasis, COMPLETION_TOLERANCE, RANK_TOLERANCE};

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid_arg, invalid_input, Result};
use crate::matrix::Matrix;

/// Maximum `|BᵀB - I|` entry accepted for an orthonormal basis.
pub const ORTHONORMALITY_TOLERANCE: f64 = 1e-10;

/// `D×r` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisMatrix(Matrix);

impl BasisMatrix {
    /// Wraps `m` after checking that its columns are orthonormal.
    pub fn new(m: Matrix) -> Result<Self> {
        if m.cols() == 0 || m.rows() == 0 {
            return Err(invalid_arg!("basis must have at least one column and row"));
        }
        if !m.is_finite() {
            return Err(invalid_input!("basis contains non-finite entries"));
        }
        let err = orthonormality_error(&m);
        if err > ORTHONORMALITY_TOLERANCE {
            return Err(invalid_input!("columns not orthonormal (max error {err:e})"));
        }
        Ok(Self(m))
    }

    pub(crate) fn from_orthonormal(m: Matrix) -> Self {
        debug_assert!(orthonormality_error(&m) <= ORTHONORMALITY_TOLERANCE);
        Self(m)
    }

    /// Ambient dimension `D`.
    pub fn ambient_dim(&self) -> usize {
        self.0.rows()
    }

    /// Subspace dimension `r`.
    pub fn dim(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

/// `max |BᵀB - I|` over all entries.
pub fn orthonormality_error(b: &Matrix) -> f64 {
    let gram = b.tr_mul(b).expect("square by construction");
    let mut worst: f64 = 0.0;
    for i in 0..gram.rows() {
        for j in 0..gram.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Principal angles between `span(e)` and `span(f)`, non-decreasing, in `[0, π/2]`.
///
/// Cosines come from the singular values of `EᵀF`, clamped to `[0, 1]`.
/// Angles below `π/4` are taken from the sines instead (singular values of
/// the residual `F - E EᵀF`), since `arccos` loses about half the digits
/// near zero. The result has `min(r_E, r_F)` entries.
pub fn principal_angles(e: &BasisMatrix, f: &BasisMatrix) -> Result<Vec<f64>> {
    if e.ambient_dim() != f.ambient_dim() {
        return Err(invalid_arg!(
            "ambient dimension mismatch: {} vs {}",
            e.ambient_dim(),
            f.ambient_dim()
        ));
    }
    // The larger subspace goes first so the residual has exactly one sine per angle.
    let (big, small) = if e.dim() >= f.dim() { (e, f) } else { (f, e) };
    let cross = big.matrix().tr_mul(small.matrix())?;
    let cosines = JacobiSvd::new(&cross);

    let mut residual = small.matrix().clone();
    let projected = big.matrix().mul(&cross)?;
    for j in 0..residual.cols() {
        for (r, p) in residual.col_mut(j).iter_mut().zip(projected.col(j)) {
            *r -= p;
        }
    }
    let sines = JacobiSvd::new(&residual);
    let r = small.dim();

    let mut angles: Vec<f64> = (0..r)
        .map(|k| {
            let c = cosines.singular_values()[k].clamp(0.0, 1.0);
            let s = sines.singular_values()[r - 1 - k].clamp(0.0, 1.0);
            let theta = if c * c >= 0.5 { libm::asin(s) } else { libm::acos(c) };
            theta.clamp(0.0, FRAC_PI_2)
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    Ok(angles)
}

/// Squared geodesic distance `‖Θ‖²`.
pub fn geodesic_dist_sq(e: &BasisMatrix, f: &BasisMatrix) -> Result<f64> {
    Ok(principal_angles(e, f)?.iter().map(|t| t * t).sum())
}

/// Geodesic distance scaled by `4/(nπ²)` into `[0, 1]`.
pub fn normalized_geodesic_dist(e: &BasisMatrix, f: &BasisMatrix, n: usize) -> Result<f64> {
    if e.dim() != n || f.dim() != n {
        return Err(invalid_arg!(
            "expected two {n}-dimensional subspaces, got {} and {}",
            e.dim(),
            f.dim()
        ));
    }
    let beta = 4.0 / (n as f64 * PI * PI);
    Ok((beta * geodesic_dist_sq(e, f)?).min(1.0))
}

/// `‖μᵢ - μⱼ‖² / D`. Lies in `[0, 1]` when both origins have entries in `[0, 1]`.
pub fn normalized_origin_dist(mu_i: &[f64], mu_j: &[f64]) -> Result<f64> {
    if mu_i.len() != mu_j.len() {
        return Err(invalid_arg!(
            "origin length mismatch: {} vs {}",
            mu_i.len(),
            mu_j.len()
        ));
    }
    if mu_i.is_empty() {
        return Err(invalid_arg!("origins must be non-empty"));
    }
    let out_of_range = |v: &f64| !(0.0..=1.0).contains(v);
    if mu_i.iter().any(out_of_range) || mu_j.iter().any(out_of_range) {
        log::warn!("origin entries outside [0, 1]; normalised distance may exceed 1");
    }
    let ss: f64 = mu_i.iter().zip(mu_j).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(ss / mu_i.len() as f64)
}

/// Affine subspace `{μ, U}`: an origin plus an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    pub mu: Vec<f64>,
    pub basis: BasisMatrix,
    /// The basis was partly completed from canonical vectors.
    pub rank_deficient: bool,
}

impl AffineSubspace {
    pub fn new(mu: Vec<f64>, basis: BasisMatrix, rank_deficient: bool) -> Result<Self> {
        if mu.len() != basis.ambient_dim() {
            return Err(invalid_arg!(
                "origin length {} does not match basis ambient dimension {}",
                mu.len(),
                basis.ambient_dim()
            ));
        }
        Ok(Self {
            mu,
            basis,
            rank_deficient,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.mu.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

/// `α·d̂_o(μᵢ, μⱼ) + (1-α)·d̂_g(Uᵢ, Uⱼ)`.
pub fn affine_dist(a: &AffineSubspace, b: &AffineSubspace, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid_arg!("alpha {alpha} outside [0, 1]"));
    }
    if a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim() {
        return Err(invalid_arg!(
            "subspace shape mismatch: {}x{} vs {}x{}",
            a.ambient_dim(),
            a.dim(),
            b.ambient_dim(),
            b.dim()
        ));
    }
    // Skip the half that carries zero weight; the ablation endpoints hit this.
    let origin = if alpha > 0.0 {
        normalized_origin_dist(&a.mu, &b.mu)?
    } else {
        0.0
    };
    let geodesic = if alpha < 1.0 {
        normalized_geodesic_dist(&a.basis, &b.basis, a.dim())?
    } else {
        0.0
    };
    Ok(alpha * origin + (1.0 - alpha) * geodesic)
}

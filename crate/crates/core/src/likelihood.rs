//! Per-bag-entry likelihoods, their normalisation over particles, the sum
//! rule across the bag, and winner selection.
//!
//! With `σ = 0.01` a distance of 1 gives `exp(-100)`, and whole columns can
//! underflow long before that matters for the ratios. Everything here that
//! normalises works on log-likelihoods with a per-column log-sum-exp shift.

use alloc::vec::Vec;

use crate::error::{invalid_arg, invalid_input, Error, Result};
use crate::matrix::Matrix;

/// `exp(-dist/σ)`.
pub fn likelihood(dist: f64, sigma: f64) -> f64 {
    libm::exp(log_likelihood(dist, sigma))
}

/// `-dist/σ`.
#[inline]
pub fn log_likelihood(dist: f64, sigma: f64) -> f64 {
    -dist / sigma
}

/// `ln Σ exp(xᵢ)`, shifted by the maximum. Returns `-∞` for an empty slice
/// or when every entry is `-∞`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return max;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + libm::log(xs.iter().map(|x| libm::exp(x - max)).sum::<f64>())
}

/// Divides each column of an `N×K` log-likelihood matrix by its sum over
/// particles and returns the normalised likelihoods in linear scale.
pub fn normalize_log_columns(log_lik: &Matrix) -> Result<Matrix> {
    if log_lik.as_slice().iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(invalid_input!("log-likelihoods must be finite or -inf"));
    }
    let mut out = Matrix::zeros(log_lik.rows(), log_lik.cols());
    for k in 0..log_lik.cols() {
        let col = log_lik.col(k);
        let lse = log_sum_exp(col);
        if lse == f64::NEG_INFINITY {
            return Err(Error::DegenerateLikelihood { column: k });
        }
        for (o, &l) in out.col_mut(k).iter_mut().zip(col) {
            *o = libm::exp(l - lse);
        }
    }
    Ok(out)
}

/// Column normalisation of raw (linear) likelihoods, routed through the
/// log domain.
pub fn normalize_over_particles(raw: &Matrix) -> Result<Matrix> {
    if raw.as_slice().iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(invalid_input!("likelihoods must be finite and non-negative"));
    }
    let logs: Vec<f64> = raw.as_slice().iter().map(|&v| libm::log(v)).collect();
    normalize_log_columns(&Matrix::from_col_major(raw.rows(), raw.cols(), logs)?)
}

/// Sum rule across bag entries: row sums of the normalised matrix.
pub fn overall_likelihood(normalized: &Matrix) -> Vec<f64> {
    let mut out = alloc::vec![0.0; normalized.rows()];
    for k in 0..normalized.cols() {
        for (o, v) in out.iter_mut().zip(normalized.col(k)) {
            *o += v;
        }
    }
    out
}

/// Index of the largest entry; ties go to the lowest index.
pub fn select_winner(overall: &[f64]) -> Result<usize> {
    if overall.is_empty() {
        return Err(invalid_arg!("cannot select a winner from no particles"));
    }
    let mut best = 0;
    for (i, v) in overall.iter().enumerate().skip(1) {
        if *v > overall[best] {
            best = i;
        }
    }
    Ok(best)
}

//! One-sided Jacobi SVD and the rank-aware thin basis built on it.
//!
//! The Hestenes iteration orthogonalises the columns of the input in place
//! with plane rotations. After convergence the column norms are the singular
//! values and the normalised columns are the left singular vectors. Each
//! sweep costs `O(m³)` after an `O(D m²)` QR reduction of a `D×m` input,
//! so building a basis from a `D×(P+1)` window is linear in `D`.

use alloc::vec::Vec;

use super::BasisMatrix;
use crate::error::{invalid_arg, invalid_input, Result};
use crate::matrix::{dot, norm, Matrix};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Canonical vectors whose residual norm falls below this are skipped
/// during basis completion.
pub const COMPLETION_TOLERANCE: f64 = 1e-8;

const MAX_SWEEPS: usize = 80;
const ORTHOGONALITY_TOLERANCE: f64 = 1e-15;

/// Left singular vectors and singular values of a matrix, sorted by
/// decreasing singular value.
///
/// Tall inputs are first reduced with a Householder QR so the rotations run
/// on the `m×m` triangular factor; left vectors are mapped back through `Q`
/// on request.
#[derive(Debug, Clone)]
pub struct JacobiSvd {
    /// Column `k` equals `σ_k ũ_k`, in the reduced coordinates when `qr` is set.
    scaled_left: Matrix,
    qr: Option<Householder>,
    order: Vec<usize>,
    singular_values: Vec<f64>,
}

impl JacobiSvd {
    pub fn new(a: &Matrix) -> Self {
        let (mut w, qr) = if a.rows() > a.cols() {
            let (h, r) = Householder::factor(a);
            (r, Some(h))
        } else {
            (a.clone(), None)
        };
        let m = w.cols();
        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..m {
                for q in (p + 1)..m {
                    let alpha = dot(w.col(p), w.col(p));
                    let beta = dot(w.col(q), w.col(q));
                    let gamma = dot(w.col(p), w.col(q));
                    if gamma == 0.0
                        || gamma.abs() <= ORTHOGONALITY_TOLERANCE * libm::sqrt(alpha * beta)
                    {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                    let c = 1.0 / libm::sqrt(1.0 + t * t);
                    let s = c * t;
                    rotate_columns(&mut w, p, q, c, s);
                }
            }
            if !rotated {
                break;
            }
        }

        let norms: Vec<f64> = (0..m).map(|j| norm(w.col(j))).collect();
        let mut order: Vec<usize> = (0..m).collect();
        // Stable sort keeps ties in column order, which keeps results deterministic.
        order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]));
        let singular_values = order.iter().map(|&j| norms[j]).collect();
        Self {
            scaled_left: w,
            qr,
            order,
            singular_values,
        }
    }

    /// Singular values in non-increasing order.
    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// Unit left singular vector for the `k`-th largest singular value.
    /// Returns `None` when that singular value is exactly zero.
    pub fn left_vector(&self, k: usize) -> Option<Vec<f64>> {
        let sigma = self.singular_values[k];
        if sigma == 0.0 {
            return None;
        }
        let col = self.scaled_left.col(self.order[k]);
        let u: Vec<f64> = col.iter().map(|v| v / sigma).collect();
        Some(match &self.qr {
            Some(h) => h.apply_q(&u),
            None => u,
        })
    }
}

/// Thin Householder QR of a `D×m` matrix, `D > m`.
#[derive(Debug, Clone)]
struct Householder {
    rows: usize,
    /// Reflector `j` acts on rows `j..D`; stored with unit norm, or empty
    /// when the column was already zero below the diagonal.
    reflectors: Vec<Vec<f64>>,
}

impl Householder {
    fn factor(a: &Matrix) -> (Self, Matrix) {
        let (d, m) = (a.rows(), a.cols());
        let mut w = a.clone();
        let mut reflectors = Vec::with_capacity(m);
        for j in 0..m {
            let x = &w.col(j)[j..];
            let nx = norm(x);
            if nx == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            let mut v = x.to_vec();
            let alpha = if v[0] >= 0.0 { -nx } else { nx };
            v[0] -= alpha;
            let nv = norm(&v);
            if nv == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            v.iter_mut().for_each(|x| *x /= nv);
            for k in j..m {
                let col = &mut w.col_mut(k)[j..];
                let c = 2.0 * dot(&v, col);
                for (ci, vi) in col.iter_mut().zip(&v) {
                    *ci -= c * vi;
                }
            }
            reflectors.push(v);
        }
        let mut r = Matrix::zeros(m, m);
        for k in 0..m {
            for i in 0..=k {
                r[(i, k)] = w[(i, k)];
            }
        }
        (Self { rows: d, reflectors }, r)
    }

    /// `Q·[y; 0]` for `y` of length `m`.
    fn apply_q(&self, y: &[f64]) -> Vec<f64> {
        let mut x = alloc::vec![0.0; self.rows];
        x[..y.len()].copy_from_slice(y);
        for (j, v) in self.reflectors.iter().enumerate().rev() {
            if v.is_empty() {
                continue;
            }
            let seg = &mut x[j..];
            let c = 2.0 * dot(v, seg);
            for (xi, vi) in seg.iter_mut().zip(v) {
                *xi -= c * vi;
            }
        }
        x
    }
}

fn rotate_columns(w: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let rows = w.rows();
    for i in 0..rows {
        let a = w[(i, p)];
        let b = w[(i, q)];
        w[(i, p)] = c * a - s * b;
        w[(i, q)] = s * a + c * b;
    }
}

/// Result of [`thin_svd_basis`].
#[derive(Debug, Clone)]
pub struct ThinSvdBasis {
    pub basis: BasisMatrix,
    /// All singular values of the input, non-increasing.
    pub singular_values: Vec<f64>,
    /// Numerical rank of the input under [`RANK_TOLERANCE`].
    pub rank: usize,
    /// Set when fewer than `n` columns came from the input's column space
    /// and the rest were completed from canonical vectors.
    pub rank_deficient: bool,
}

/// Orthonormal basis of the `n` dominant left singular vectors of `v`.
///
/// Columns past the numerical rank are filled by Gram-Schmidt on
/// `e₁, e₂, …` against the accepted columns.
pub fn thin_svd_basis(v: &Matrix, n: usize) -> Result<ThinSvdBasis> {
    let (d, m) = (v.rows(), v.cols());
    if !v.is_finite() {
        return Err(invalid_input!("matrix contains non-finite entries"));
    }
    if d == 0 || n == 0 {
        return Err(invalid_arg!("empty matrix or zero target dimension"));
    }
    if n > m {
        return Err(invalid_arg!("target dimension {n} exceeds column count {m}"));
    }
    if m > d {
        return Err(invalid_arg!("column count {m} exceeds ambient dimension {d}"));
    }

    let svd = JacobiSvd::new(v);
    let sv = svd.singular_values();
    let cutoff = RANK_TOLERANCE * sv[0];
    let rank = sv.iter().take_while(|&&s| s > cutoff && s > 0.0).count();

    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(n);
    for k in 0..rank.min(n) {
        if let Some(u) = svd.left_vector(k) {
            if let Some(q) = orthonormalize_against(&u, &columns, COMPLETION_TOLERANCE) {
                columns.push(q);
            }
        }
    }
    let from_input = columns.len();
    let mut e = 0;
    while columns.len() < n && e < d {
        let mut canonical = alloc::vec![0.0; d];
        canonical[e] = 1.0;
        if let Some(q) = orthonormalize_against(&canonical, &columns, COMPLETION_TOLERANCE) {
            columns.push(q);
        }
        e += 1;
    }
    debug_assert_eq!(columns.len(), n);

    let basis = BasisMatrix::from_orthonormal(Matrix::from_columns(&columns)?);
    Ok(ThinSvdBasis {
        basis,
        singular_values: sv.to_vec(),
        rank,
        rank_deficient: from_input < n,
    })
}

/// Two passes of modified Gram-Schmidt. Returns the normalised residual,
/// or `None` if its norm falls below `tol`.
fn orthonormalize_against(v: &[f64], basis: &[Vec<f64>], tol: f64) -> Option<Vec<f64>> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, &r);
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= c * qi;
            }
        }
    }
    let nr = norm(&r);
    if nr <= tol * norm(v).max(f64::MIN_POSITIVE) || nr == 0.0 {
        return None;
    }
    r.iter_mut().for_each(|x| *x /= nr);
    Some(r)
}

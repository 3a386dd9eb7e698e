//! Slow, straightforward reference computations for tests.
//!
//! Nothing here shares code with the tracker crates. Matrices are plain
//! row-major `Vec<Vec<f64>>`.

use rand::Rng;
use rand_distr::StandardNormal;

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

pub fn transpose(a: &Mat) -> Mat {
    let (r, c) = (a.len(), a[0].len());
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let (r, k, c) = (a.len(), b.len(), b[0].len());
    assert_eq!(a[0].len(), k);
    let mut out = zeros(r, c);
    for i in 0..r {
        for j in 0..c {
            out[i][j] = (0..k).map(|t| a[i][t] * b[t][j]).sum();
        }
    }
    out
}

pub fn column(a: &Mat, j: usize) -> Vec<f64> {
    a.iter().map(|row| row[j]).collect()
}

pub fn from_columns(cols: &[Vec<f64>]) -> Mat {
    let r = cols[0].len();
    (0..r).map(|i| cols.iter().map(|c| c[i]).collect()).collect()
}

pub fn gaussian<R: Rng>(rng: &mut R, r: usize, c: usize) -> Mat {
    (0..r)
        .map(|_| (0..c).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
        .collect()
}

/// `k` orthonormal columns from classical Gram-Schmidt (applied twice) on
/// Gaussian vectors.
pub fn random_orthonormal<R: Rng>(rng: &mut R, d: usize, k: usize) -> Mat {
    assert!(k <= d);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for _ in 0..2 {
            for q in &cols {
                let c: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    from_columns(&cols)
}

/// Eigen-decomposition of a symmetric matrix by cyclic two-sided Jacobi
/// rotations. Eigenvalues descending; eigenvectors are the columns of the
/// returned matrix.
pub fn symmetric_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.len();
    let mut a = a.clone();
    let mut v = zeros(n, n);
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-32 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let vals = idx.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..n).map(|r| idx.iter().map(|&i| v[r][i]).collect()).collect();
    (vals, vecs)
}

/// `B Bᵀ`.
pub fn projector(b: &Mat) -> Mat {
    matmul(b, &transpose(b))
}

/// Frobenius norm of `P_A - P_B`, which equals `√2 ‖sin Θ‖` for two
/// subspaces of equal dimension.
pub fn projector_distance(a: &Mat, b: &Mat) -> f64 {
    let (pa, pb) = (projector(a), projector(b));
    pa.iter()
        .zip(&pb)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y) * (x - y)))
        .sum::<f64>()
        .sqrt()
}

/// Two `n`-dimensional subspaces of `R^d` (`d ≥ 2n`) with prescribed
/// principal angles, each given in a randomly rotated basis.
pub fn bases_with_angles<R: Rng>(rng: &mut R, d: usize, angles: &[f64]) -> (Mat, Mat) {
    let n = angles.len();
    assert!(d >= 2 * n);
    let q = random_orthonormal(rng, d, 2 * n);
    let e_cols: Vec<Vec<f64>> = (0..n).map(|i| column(&q, i)).collect();
    let f_cols: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (c, s) = (angles[i].cos(), angles[i].sin());
            column(&q, i)
                .iter()
                .zip(column(&q, n + i))
                .map(|(a, b)| c * a + s * b)
                .collect()
        })
        .collect();
    let re = random_orthonormal(rng, n, n);
    let rf = random_orthonormal(rng, n, n);
    (
        matmul(&from_columns(&e_cols), &re),
        matmul(&from_columns(&f_cols), &rf),
    )
}

/// `Q₁ diag(σ) Q₂ᵀ` with random orthonormal `Q₁` (`d×m`) and `Q₂` (`m×m`).
/// Returns the matrix and `Q₁`.
pub fn matrix_with_spectrum<R: Rng>(rng: &mut R, d: usize, sigma: &[f64]) -> (Mat, Mat) {
    let m = sigma.len();
    let q1 = random_orthonormal(rng, d, m);
    let q2 = random_orthonormal(rng, m, m);
    let mut scaled = q1.clone();
    for row in scaled.iter_mut() {
        for (x, s) in row.iter_mut().zip(sigma) {
            *x *= s;
        }
    }
    (matmul(&scaled, &transpose(&q2)), q1)
}

/// Bilinear resize of the crop `[x0, x0+rw) × [y0, y0+rh)` of a `w`-wide
/// row-major image to `ow×oh`, samples at pixel centres, edges replicated
/// at the crop border.
pub fn bilinear_reference(
    img: &[f64],
    w: usize,
    region: (usize, usize, usize, usize),
    ow: usize,
    oh: usize,
) -> Vec<f64> {
    let (x0, y0, rw, rh) = region;
    let crop = |x: i64, y: i64| -> f64 {
        let x = x.clamp(0, rw as i64 - 1) as usize;
        let y = y.clamp(0, rh as i64 - 1) as usize;
        img[(y0 + y) * w + x0 + x]
    };
    let mut out = Vec::with_capacity(ow * oh);
    for j in 0..oh {
        for i in 0..ow {
            let sx = (i as f64 + 0.5) * rw as f64 / ow as f64 - 0.5;
            let sy = (j as f64 + 0.5) * rh as f64 / oh as f64 - 0.5;
            let (fx, fy) = (sx.floor(), sy.floor());
            let (tx, ty) = (sx - fx, sy - fy);
            let (ix, iy) = (fx as i64, fy as i64);
            let top = crop(ix, iy) * (1.0 - tx) + crop(ix + 1, iy) * tx;
            let bottom = crop(ix, iy + 1) * (1.0 - tx) + crop(ix + 1, iy + 1) * tx;
            out.push(top * (1.0 - ty) + bottom * ty);
        }
    }
    out
}

use bagtrack_core::{
    likelihood, normalize_log_columns, normalize_over_particles, overall_likelihood, select_winner,
    Matrix,
};
use proptest::prelude::*;

fn direct_normalise(raw: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = raw.len();
    let k = raw[0].len();
    let mut out = vec![vec![0.0; k]; n];
    for j in 0..k {
        let s: f64 = raw.iter().map(|r| r[j]).sum();
        for i in 0..n {
            out[i][j] = raw[i][j] / s;
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn columns_sum_to_one_and_rows_to_k(
        (n, k, dists) in (1usize..40, 1usize..12).prop_flat_map(|(n, k)| {
            (Just(n), Just(k), prop::collection::vec(0.0f64..=1.0, n * k))
        })
    ) {
        let sigma = 0.01;
        let logs = Matrix::from_col_major(n, k, dists.iter().map(|d| -d / sigma).collect()).unwrap();
        let norm = normalize_log_columns(&logs).unwrap();
        for j in 0..k {
            prop_assert!((norm.col(j).iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        let overall = overall_likelihood(&norm);
        prop_assert!((overall.iter().sum::<f64>() - k as f64).abs() < 1e-10);
        prop_assert!(overall.iter().all(|&v| v >= 0.0 && v <= k as f64 + 1e-12));

        // Where exp(-d/σ) is comfortably representable, the log route agrees with plain division.
        let raw: Vec<Vec<f64>> = (0..n).map(|i| (0..k).map(|j| likelihood(dists[j * n + i], sigma)).collect()).collect();
        let representable = (0..k).all(|j| raw.iter().map(|r| r[j]).sum::<f64>() > 1e-250);
        if representable {
            let direct = direct_normalise(&raw);
            for i in 0..n {
                for j in 0..k {
                    prop_assert!((norm[(i, j)] - direct[i][j]).abs() < 1e-10);
                }
            }
        }
    }
}

#[test]
fn linear_and_log_routes_agree() {
    let raw = Matrix::from_col_major(3, 2, vec![0.1, 0.2, 0.7, 1e-200, 3e-200, 0.0]).unwrap();
    let n = normalize_over_particles(&raw).unwrap();
    assert!((n[(2, 0)] - 0.7).abs() < 1e-12);
    assert!((n[(1, 1)] - 0.75).abs() < 1e-12);
    assert_eq!(n[(2, 1)], 0.0);
}

#[test]
fn winner_ties_go_to_first() {
    assert_eq!(select_winner(&[0.2, 0.5, 0.5, 0.1]).unwrap(), 1);
}
